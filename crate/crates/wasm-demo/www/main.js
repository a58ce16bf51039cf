import init, { gain_landscape, learning_run, anticoncentration_curve } from "./pkg/id3_juntas_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const SVG = "http://www.w3.org/2000/svg";

function svgEl(tag, attrs, text) {
  const el = document.createElementNS(SVG, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  if (text !== undefined) el.textContent = text;
  return el;
}

function showError(target, e) {
  target.replaceChildren();
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(e);
  target.append(p);
}

function drawBars(target, values, highlight) {
  const w = 640, h = 220, pad = 36;
  const max = Math.max(...values, 1e-12);
  const svg = svgEl("svg", { width: w, height: h, viewBox: `0 0 ${w} ${h}` });
  const bw = (w - 2 * pad) / values.length;
  values.forEach((v, i) => {
    const bh = (v / max) * (h - 2 * pad);
    svg.append(svgEl("rect", {
      x: pad + i * bw + 2, y: h - pad - bh, width: Math.max(bw - 4, 1), height: bh,
      fill: highlight(i) ? "#1f77b4" : "#aaa",
    }));
    svg.append(svgEl("text", { x: pad + (i + 0.5) * bw, y: h - pad + 14, "text-anchor": "middle", "font-size": 11 }, `x${i}`));
  });
  svg.append(svgEl("text", { x: pad, y: pad - 10, "font-size": 11 }, `max gain ${max.toExponential(3)}`));
  target.replaceChildren(svg);
}

function updateLandscape() {
  $("g-p-out").textContent = $("g-p").value;
  try {
    const r = JSON.parse(gain_landscape(num("g-n"), num("g-k"), num("g-p"), $("g-imp").value));
    drawBars($("g-chart"), r.features.map((f) => f.gain), (i) => r.features[i].in_support);
    $("g-info").textContent =
      `Pr(y = 1) = ${r.label_prob.toFixed(6)}; lower bound on |I| for support coordinates: ${r.lower_bound.toExponential(3)}; ` +
      `smallest support |I|: ${Math.min(...r.features.filter((f) => f.in_support).map((f) => Math.abs(f.I))).toExponential(3)}`;
  } catch (e) {
    showError($("g-chart"), e);
  }
}

function runLearning() {
  const out = $("l-out");
  out.textContent = "running...";
  // Let the page repaint before the synchronous run.
  setTimeout(() => {
    try {
      const r = JSON.parse(learning_run(num("l-n"), num("l-k"), num("l-p"), num("l-m"), num("l-t"), BigInt(num("l-s"))));
      const rows = r.trials.map((t) =>
        `<tr><td>${t.trial}</td><td>${t.exact_loss === null ? "error" : t.exact_loss.toPrecision(4)}</td>` +
        `<td>${t.success ? "yes" : "no"}</td><td>${t.tree_size}</td><td>${t.junta_only ? "yes" : "no"}</td></tr>`).join("");
      out.innerHTML =
        `<p>success rate <b>${r.success_rate}</b>, mean loss ${r.mean_loss?.toPrecision(4) ?? "-"}, mean tree size ${r.mean_tree_size ?? "-"}</p>` +
        `<table><tr><th>trial</th><th>exact loss</th><th>zero loss</th><th>size</th><th>only support</th></tr>${rows}</table>` +
        `<p>Tree from trial 0:</p>`;
      const pre = document.createElement("pre");
      pre.textContent = r.first_tree;
      out.append(pre);
    } catch (e) {
      showError(out, e);
    }
  }, 10);
}

function drawCurve() {
  try {
    const r = JSON.parse(anticoncentration_curve(num("a-k"), num("a-c"), BigInt(num("a-s"))));
    const w = 640, h = 260, pad = 44;
    const xs = r.points.map((p) => Math.log10(p.eps));
    const x0 = Math.min(...xs), x1 = Math.max(...xs);
    const px = (e) => pad + ((Math.log10(e) - x0) / (x1 - x0)) * (w - 2 * pad);
    const py = (v) => h - pad - Math.min(v, 1) * (h - 2 * pad);
    const svg = svgEl("svg", { width: w, height: h, viewBox: `0 0 ${w} ${h}` });
    svg.append(svgEl("path", { d: `M${pad} ${pad} L${pad} ${h - pad} L${w - pad} ${h - pad}`, fill: "none", stroke: "#000" }));
    for (const [key, color] of [["bound", "#d62728"], ["estimate", "#1f77b4"]]) {
      const pts = r.points.map((p) => `${px(p.eps).toFixed(1)},${py(p[key]).toFixed(1)}`).join(" ");
      svg.append(svgEl("polyline", { points: pts, fill: "none", stroke: color, "stroke-width": 2 }));
    }
    for (const p of r.points.filter((_, i) => i % 2 === 0)) {
      svg.append(svgEl("text", { x: px(p.eps), y: h - pad + 16, "text-anchor": "middle", "font-size": 11 }, p.eps.toExponential(0)));
    }
    svg.append(svgEl("text", { x: pad - 6, y: py(1) + 4, "text-anchor": "end", "font-size": 11 }, "1"));
    svg.append(svgEl("text", { x: pad - 6, y: py(0) + 4, "text-anchor": "end", "font-size": 11 }, "0"));
    svg.append(svgEl("text", { x: w - pad, y: pad - 8, "text-anchor": "end", "font-size": 11, fill: "#d62728" }, "envelope (capped at 1)"));
    svg.append(svgEl("text", { x: w - pad, y: pad + 6, "text-anchor": "end", "font-size": 11, fill: "#1f77b4" }, "Monte-Carlo estimate"));
    $("a-chart").replaceChildren(svg);
    $("a-info").textContent = `truth table ${r.table.join("")}, split on x${r.coordinate}, ${r.draws} draws per point`;
  } catch (e) {
    showError($("a-chart"), e);
  }
}

await init();
for (const id of ["g-n", "g-k", "g-p", "g-imp"]) $(id).addEventListener("input", updateLandscape);
$("l-run").addEventListener("click", runLearning);
$("a-run").addEventListener("click", drawCurve);
updateLandscape();
drawCurve();
