import init, { efficiencySummary, criticalityRanking, robustnessCurves } from "./pkg/tradenet_wasm.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

// Small random trade data: a few hubs with many partners, volumes drifting by year.
function sample() {
  const codes = ["USA", "CHN", "JPN", "DEU", "NLD", "SAU", "RUS", "ARE", "IRQ", "CAN", "NOR", "KOR", "IND", "NGA"];
  let seed = Math.floor(Math.random() * 1e9);
  const rand = () => ((seed = (seed * 1103515245 + 12345) % 2147483648) / 2147483648);
  const rows = ["year,exporter,importer,volume"];
  for (let year = 2010; year <= 2017; year++) {
    for (const a of codes) {
      for (const b of codes) {
        if (a !== b && rand() < 0.22) {
          rows.push(`${year},${a},${b},${Math.round(Math.exp(4 + 3 * rand()) * (1 + (year - 2010) / 10))}`);
        }
      }
    }
  }
  return rows.join("\n");
}

function params() {
  return {
    csv: $("csv").value,
    year: parseInt($("year").value, 10) || 0,
    kind: $("kind").value,
    mode: $("mode").value,
    top: Math.max(1, parseInt($("top").value, 10) || 10),
    maxp: parseFloat($("maxp").value),
    step: parseFloat($("step").value),
    samples: Math.max(1, parseInt($("samples").value, 10) || 1),
    seed: Math.max(0, parseInt($("seed").value, 10) || 0),
  };
}

function run(f) {
  $("error").textContent = "";
  try {
    f();
  } catch (e) {
    $("error").textContent = String(e);
  }
}

function table(header, rows) {
  const head = "<tr>" + header.map((h) => `<th>${h}</th>`).join("") + "</tr>";
  const body = rows.map((r) => "<tr>" + r.map((c) => `<td>${c}</td>`).join("") + "</tr>").join("");
  $("table").innerHTML = `<table>${head}${body}</table>`;
}

const fmt = (x) => (x === null ? "" : Number.isInteger(x) ? String(x) : x.toPrecision(5));

// Line plot of named series sharing an x axis.
function linePlot(series, xLabel) {
  const c = $("plot"), g = c.getContext("2d");
  const pad = { l: 50, r: 130, t: 14, b: 34 };
  g.clearRect(0, 0, c.width, c.height);
  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1])).filter((y) => y !== null);
  if (!xs.length) return;
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(0, ...ys), Math.max(...ys, 1e-12)];
  const X = (x) => pad.l + ((x - x0) / (x1 - x0 || 1)) * (c.width - pad.l - pad.r);
  const Y = (y) => c.height - pad.b - ((y - y0) / (y1 - y0 || 1)) * (c.height - pad.t - pad.b);
  g.strokeStyle = "#999";
  g.strokeRect(pad.l, pad.t, c.width - pad.l - pad.r, c.height - pad.t - pad.b);
  g.fillStyle = "#444";
  g.font = "12px sans-serif";
  g.fillText(fmt(y1), 4, pad.t + 10);
  g.fillText(fmt(y0), 4, c.height - pad.b);
  g.fillText(fmt(x0), pad.l, c.height - 12);
  g.fillText(fmt(x1), c.width - pad.r - 30, c.height - 12);
  g.fillText(xLabel, (c.width - pad.r) / 2, c.height - 12);
  series.forEach((s, i) => {
    g.strokeStyle = g.fillStyle = COLORS[i % COLORS.length];
    g.beginPath();
    s.points.filter((p) => p[1] !== null).forEach(([x, y], j) => (j ? g.lineTo(X(x), Y(y)) : g.moveTo(X(x), Y(y))));
    g.stroke();
    g.fillText(s.name, c.width - pad.r + 10, pad.t + 16 * (i + 1));
  });
}

// Horizontal bars for a ranking; negative values extend left of the axis.
function barPlot(entries) {
  const c = $("plot"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const vals = entries.map((e) => e.criticality ?? 0);
  const lo = Math.min(0, ...vals), hi = Math.max(0, ...vals, 1e-12);
  const left = 140, width = c.width - left - 20, h = Math.min(28, (c.height - 10) / entries.length);
  const X = (v) => left + ((v - lo) / (hi - lo)) * width;
  g.font = "12px sans-serif";
  entries.forEach((e, i) => {
    const v = e.criticality ?? 0, y = 5 + i * h;
    g.fillStyle = v < 0 ? "#d62728" : "#1f77b4";
    g.fillRect(Math.min(X(0), X(v)), y, Math.abs(X(v) - X(0)), h - 4);
    g.fillStyle = "#222";
    g.fillText(e.key, 4, y + h / 2 + 2);
  });
}

$("eff").onclick = () => run(() => {
  const rows = JSON.parse(efficiencySummary(params().csv));
  table(["year", "N", "N_e", "V", "E_A", "E_W", "E_Wbar"],
    rows.map((r) => [r.year, r.N, r.N_e, fmt(r.V), fmt(r.E_A), fmt(r.E_W), fmt(r.E_Wbar)]));
  linePlot(["E_A", "E_Wbar"].map((k) => ({ name: k, points: rows.map((r) => [r.year, r[k]]) })), "year");
});

$("rank").onclick = () => run(() => {
  const p = params();
  const res = JSON.parse(criticalityRanking(p.csv, p.year, p.kind, p.mode, p.top));
  table(["rank", `${p.kind} (${res.year})`, "criticality"], res.ranked.map((e, i) => [i + 1, e.key, fmt(e.criticality)]));
  barPlot(res.ranked);
});

$("robust").onclick = () => run(() => {
  const p = params();
  if (p.mode === "normalized") throw "robustness uses the unweighted or weighted mode";
  const res = JSON.parse(robustnessCurves(p.csv, p.year, p.kind, p.mode, p.maxp, p.step, p.samples, p.seed));
  linePlot(res.curves.map((c) => ({ name: c.strategy, points: c.points.map((q) => [q.p, q.R]) })), `p (${res.year})`);
  const first = res.curves[0].points;
  table(["p", ...res.curves.map((c) => c.strategy)],
    first.map((q, i) => [fmt(q.p), ...res.curves.map((c) => fmt(c.points[i].R))]));
});

$("regen").onclick = () => ($("csv").value = sample());

await init();
$("csv").value = sample();
