import init, { names, reconstruct, kernel_profile, convergence } from "./pkg/expsamp_wasm.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c"];

function plot(canvas, series, { logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, width, height);
  const ty = (y) => (logY ? Math.log10(y) : y);
  const pts = series.flatMap((s) => s.x.map((x, i) => [x, s.y[i]])).filter(([, y]) => y != null && (!logY || y > 0));
  if (pts.length === 0) return;
  let [x0, x1] = [Math.min(...pts.map((p) => p[0])), Math.max(...pts.map((p) => p[0]))];
  let [y0, y1] = [Math.min(...pts.map((p) => ty(p[1]))), Math.max(...pts.map((p) => ty(p[1])))];
  if (x0 === x1) { x0 -= 1; x1 += 1; }
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (width - 2 * pad);
  const sy = (y) => height - pad - ((ty(y) - y0) / (y1 - y0)) * (height - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, width - 2 * pad, height - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  const fmt = (v) => (logY ? `1e${v.toFixed(1)}` : v.toPrecision(3));
  ctx.fillText(fmt(y1), 2, pad + 4);
  ctx.fillText(fmt(y0), 2, height - pad);
  ctx.fillText(x0.toPrecision(3), pad, height - pad + 16);
  ctx.fillText(x1.toPrecision(3), width - pad - 30, height - pad + 16);

  series.forEach((s, k) => {
    ctx.strokeStyle = ctx.fillStyle = COLORS[k % COLORS.length];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let open = false;
    s.x.forEach((x, i) => {
      const y = s.y[i];
      if (y == null || (logY && y <= 0)) { open = false; return; }
      if (open) ctx.lineTo(sx(x), sy(y)); else ctx.moveTo(sx(x), sy(y));
      open = true;
      if (s.dots) ctx.fillRect(sx(x) - 2, sy(y) - 2, 4, 4);
    });
    ctx.stroke();
    ctx.fillText(s.label, width - pad - 160, pad + 16 + 14 * k);
  });
}

function guarded(statusId, run) {
  return () => {
    const status = $(statusId);
    try {
      status.className = "status";
      status.textContent = run();
    } catch (e) {
      status.className = "status error";
      status.textContent = String(e);
    }
  };
}

const updateReconstruction = guarded("rec-status", () => {
  const op = $("rec-op").value;
  const r = JSON.parse(reconstruct(op, $("rec-kernel").value, $("rec-function").value,
    +$("rec-w").value, +$("rec-min").value, +$("rec-max").value, 401));
  plot($("rec-plot"), [
    { x: r.log_x, y: r.f, label: "f" },
    { x: r.log_x, y: r.value, label: `${op}_w f` },
  ]);
  return [`weighted sup error ${r.weighted_sup_error.toExponential(4)}`,
    r.failures ? `${r.failures} points failed` : "", ...r.notes].filter(Boolean).join("\n");
});

const updateKernel = guarded("ker-status", () => {
  const k = JSON.parse(kernel_profile($("ker-kernel").value, -4, 4, 801));
  plot($("ker-plot"), [{ x: k.t, y: k.phi, label: "χ(e^t)" }]);
  const moments = k.moments.map(([o, v]) => `m_${o} = ${v == null ? "diverges" : v.toPrecision(6)}`);
  return [...moments, `η = ${k.eta.toPrecision(6)}`,
    `(χ1) ${k.chi1_holds}  (χ2) ${k.chi2_holds}  (χ3) ${k.chi3_holds}`].join("\n");
});

const updateConvergence = guarded("conv-status", () => {
  const c = JSON.parse(convergence($("conv-kernel").value, $("conv-function").value, +$("conv-w").value, +$("conv-n").value));
  plot($("conv-plot"), [{ x: c.w.map(Math.log2), y: c.weighted_sup_error, label: "weighted error vs log2 w", dots: true }], { logY: true });
  return c.fitted_order == null ? "no fitted order" : `fitted order ${c.fitted_order.toFixed(3)}`;
});

await init();
const registry = JSON.parse(names());
for (const sel of document.querySelectorAll("select.kernels")) {
  for (const [name, description] of registry.kernels) sel.add(new Option(`${name}: ${description}`, name));
  sel.value = "bspline3";
}
for (const sel of document.querySelectorAll("select.functions")) {
  for (const name of registry.functions) sel.add(new Option(name, name));
  sel.value = "weight";
}
$("ker-kernel").value = "gauss1";

for (const [prefix, update] of [["rec", updateReconstruction], ["ker", updateKernel], ["conv", updateConvergence]]) {
  for (const el of document.querySelectorAll(`[id^=${prefix}-]`)) {
    if (el.tagName === "SELECT" || el.tagName === "INPUT") el.addEventListener("change", update);
  }
  update();
}
