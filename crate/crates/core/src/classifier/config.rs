use std::fmt;

use super::ClassifierError;
use crate::path::Activation;

/// Hyperparameter presets matched to the two pretrained embedding sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Senna50,
    Gigaword200,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "senna50" | "50" => Some(Preset::Senna50),
            "gigaword200" | "200" => Some(Preset::Gigaword200),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Senna50 => "senna50",
            Preset::Gigaword200 => "gigaword200",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Word and relation embedding size.
    pub dim: usize,
    /// Subtree representation size.
    pub dim_c: usize,
    /// Convolution output size `l`.
    pub hidden: usize,
    /// Convolution window `k`.
    pub window: usize,
    /// Size of each NER / WordNet feature embedding.
    pub dim_lex: usize,
    pub use_subtrees: bool,
    pub use_ner: bool,
    pub use_wordnet: bool,
    pub activation: Activation,
}

impl ModelConfig {
    pub fn preset(p: Preset) -> Self {
        let (dim, dim_c, hidden) = match p {
            Preset::Senna50 => (50, 25, 200),
            Preset::Gigaword200 => (200, 100, 400),
        };
        ModelConfig {
            dim,
            dim_c,
            hidden,
            window: 5,
            dim_lex: 25,
            use_subtrees: true,
            use_ner: false,
            use_wordnet: false,
            activation: Activation::Tanh,
        }
    }

    /// Width of the lexical feature block appended to `L`.
    pub fn lex_width(&self) -> usize {
        (2 * self.use_ner as usize + 2 * self.use_wordnet as usize) * self.dim_lex
    }

    /// Name of the feature set, e.g. `PATH+SUB+NER`.
    pub fn system_name(&self) -> String {
        let mut s = String::from("PATH");
        if self.use_subtrees {
            s.push_str("+SUB");
        }
        if self.use_wordnet {
            s.push_str("+WN");
        }
        if self.use_ner {
            s.push_str("+NER");
        }
        s
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: String| Err(ClassifierError::Config(m));
        for (name, v) in [("dim", self.dim), ("dim_c", self.dim_c), ("hidden", self.hidden)] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if (self.use_ner || self.use_wordnet) && self.dim_lex == 0 {
            return bad("dim_lex must be positive when lexical features are on".into());
        }
        if self.window < 3 || self.window.is_multiple_of(2) {
            return bad(format!("window must be odd and at least 3, got {}", self.window));
        }
        Ok(())
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::preset(Preset::Senna50)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub model: ModelConfig,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl TrainConfig {
    pub fn preset(p: Preset) -> Self {
        TrainConfig {
            model: ModelConfig::preset(p),
            learning_rate: 0.05,
            epochs: 25,
            seed: 1,
            shuffle: true,
        }
    }

    /// Check every field. A zero learning rate is allowed so a run can be
    /// replayed without moving the parameters.
    pub fn validate(&self) -> Result<(), ClassifierError> {
        self.model.validate()?;
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(ClassifierError::Config(format!(
                "learning_rate must be a non-negative number, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }

    /// Apply one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ClassifierError> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ClassifierError> {
            v.parse()
                .map_err(|_| ClassifierError::Config(format!("{key}: cannot parse {v:?}")))
        }
        fn flag(key: &str, v: &str) -> Result<bool, ClassifierError> {
            match v {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                _ => Err(ClassifierError::Config(format!(
                    "{key}: expected true or false, got {v:?}"
                ))),
            }
        }
        let m = &mut self.model;
        match key {
            "preset" => {
                let p =
                    Preset::parse(value).ok_or_else(|| ClassifierError::Config(format!("unknown preset {value:?}")))?;
                let fresh = ModelConfig::preset(p);
                m.dim = fresh.dim;
                m.dim_c = fresh.dim_c;
                m.hidden = fresh.hidden;
            }
            "dim" => m.dim = num(key, value)?,
            "dim_c" => m.dim_c = num(key, value)?,
            "hidden" | "l" => m.hidden = num(key, value)?,
            "window" | "k" => m.window = num(key, value)?,
            "dim_lex" => m.dim_lex = num(key, value)?,
            "subtrees" => m.use_subtrees = flag(key, value)?,
            "ner" => m.use_ner = flag(key, value)?,
            "wordnet" => m.use_wordnet = flag(key, value)?,
            "activation" => {
                m.activation = Activation::parse(value)
                    .ok_or_else(|| ClassifierError::Config(format!("unknown activation {value:?}")))?
            }
            "learning_rate" | "lambda" => self.learning_rate = num(key, value)?,
            "epochs" => self.epochs = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "shuffle" => self.shuffle = flag(key, value)?,
            _ => return Err(ClassifierError::Config(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    /// Apply a `key=value` file. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ClassifierError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ClassifierError::Config(format!("line {}: expected key=value", n + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| ClassifierError::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let m = &self.model;
        vec![
            ("dim", m.dim.to_string()),
            ("dim_c", m.dim_c.to_string()),
            ("hidden", m.hidden.to_string()),
            ("window", m.window.to_string()),
            ("dim_lex", m.dim_lex.to_string()),
            ("subtrees", m.use_subtrees.to_string()),
            ("ner", m.use_ner.to_string()),
            ("wordnet", m.use_wordnet.to_string()),
            ("activation", m.activation.name().to_string()),
            ("learning_rate", self.learning_rate.to_string()),
            ("epochs", self.epochs.to_string()),
            ("seed", self.seed.to_string()),
            ("shuffle", self.shuffle.to_string()),
        ]
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::preset(Preset::Senna50)
    }
}

impl fmt::Display for TrainConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.pairs() {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
