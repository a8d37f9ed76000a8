import init, { adp_from_record, train_synthetic, score_labels } from "./pkg/depnn_demo.js";

const $ = (id) => document.getElementById(id);

const SAMPLE_RECORD = [
  "7", "Instrument-Agency(e2,e1)", "2-2", "8-8",
  "A|a|2|det|_|_ thief|thief|3|nsubj|_|noun.person broke|break|0|root|_|_ the|the|5|det|_|_ " +
  "ignition|ignition|3|dobj|_|_ with|with|_|_|_|_ a|a|8|det|_|_ " +
  "screwdriver|screwdriver|3|prep_with|O|noun.artifact",
].join("\t");

function escapeHtml(s) {
  return String(s).replace(/[&<>"]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" })[c]);
}

function call(fn, target, render) {
  const out = JSON.parse(fn());
  if (out.error) {
    target.innerHTML = `<p class="error">${escapeHtml(out.error)}</p>`;
  } else {
    target.innerHTML = render(out);
  }
}

function renderAdp(v) {
  const rows = v.words
    .map((w, i) => `<tr><td>${escapeHtml(w)}</td><td>${escapeHtml(v.subtrees[i].join(" ") || "-")}</td></tr>`)
    .join("");
  return `<pre>${escapeHtml(v.path)}</pre>
    <p>gold: ${escapeHtml(v.gold ?? "none")}</p>
    <table><tr><th>path word</th><th>attached subtree</th></tr>${rows}</table>`;
}

function renderTraining(v) {
  const rows = v.epochs
    .map((e) => `<tr><td>${e.epoch}</td><td>${e.loss.toFixed(4)}</td><td>${e.accuracy.toFixed(3)}</td></tr>`)
    .join("");
  return `<p>${escapeHtml(v.system)}: held-out macro-F1 <b>${v.heldout_macro_f1.toFixed(3)}</b></p>
    <table><tr><th>epoch</th><th>loss</th><th>train acc</th></tr>${rows}</table>`;
}

function renderScores(v) {
  const rows = v.types
    .map((t) => `<tr><td>${escapeHtml(t.relation)}</td><td>${t.precision.toFixed(3)}</td>` +
      `<td>${t.recall.toFixed(3)}</td><td>${t.f1.toFixed(3)}</td></tr>`)
    .join("");
  return `<p>macro-F1 (no Other) <b>${v.macro_f1.toFixed(4)}</b>, accuracy ${v.accuracy.toFixed(4)}, ${v.total} instances</p>
    <table><tr><th>relation</th><th>P</th><th>R</th><th>F1</th></tr>${rows}</table>`;
}

async function main() {
  await init();
  $("status").textContent = "Ready.";
  $("record").value = SAMPLE_RECORD;
  $("gold").value = "Cause-Effect(e1,e2)\nCause-Effect(e2,e1)\nComponent-Whole(e1,e2)\nOther\nOther";
  $("pred").value = "Cause-Effect(e1,e2)\nCause-Effect(e1,e2)\nComponent-Whole(e1,e2)\nOther\nMessage-Topic(e1,e2)";

  $("inspect").onclick = () => call(() => adp_from_record($("record").value), $("adp"), renderAdp);
  $("train").onclick = () => {
    $("training").textContent = "Training...";
    // Let the message paint before the synchronous call blocks the page.
    setTimeout(() => call(
      () => train_synthetic(+$("count").value, +$("epochs").value, +$("seed").value, $("subtrees").checked),
      $("training"),
      renderTraining,
    ), 20);
  };
  $("score").onclick = () => call(() => score_labels($("gold").value, $("pred").value), $("scores"), renderScores);
  $("inspect").click();
}

main().catch((e) => {
  $("status").innerHTML = `<span class="error">${escapeHtml(e)}</span>`;
});
