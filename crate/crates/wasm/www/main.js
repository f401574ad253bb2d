import init, { simulate, rate_study, curves } from "./pkg/transmission_wasm.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

function status(id, text, isError = false) {
  const el = $(id);
  el.textContent = text;
  el.classList.toggle("error", isError);
}

// Minimal line plot. series: [{x, y, color, dash, label}]
function plot(canvas, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  const pad = { l: 60, r: 12, t: 12, b: 28 };
  ctx.clearRect(0, 0, width, height);
  const tx = opts.logX ? Math.log10 : (v) => v;
  const ty = opts.logY ? Math.log10 : (v) => v;
  let xs = [], ys = [];
  for (const s of series) {
    s.x.forEach((x, i) => {
      const y = s.y[i];
      if (y == null || !isFinite(ty(y))) return;
      xs.push(tx(x));
      ys.push(ty(y));
    });
  }
  if (!xs.length) return;
  let [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = opts.yRange ?? [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-12) { y0 -= 1; y1 += 1; }
  const margin = 0.05 * (y1 - y0);
  y0 -= margin; y1 += margin;
  const px = (x) => pad.l + ((tx(x) - x0) / (x1 - x0 || 1)) * (width - pad.l - pad.r);
  const py = (y) => height - pad.b - ((ty(y) - y0) / (y1 - y0)) * (height - pad.t - pad.b);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad.l, pad.t, width - pad.l - pad.r, height - pad.t - pad.b);
  ctx.fillStyle = "#555";
  ctx.font = "11px system-ui";
  const fmt = (v, log) => (log ? "1e" + v.toFixed(1) : Math.abs(v) < 1e-3 && v !== 0 ? v.toExponential(1) : v.toFixed(2));
  ctx.fillText(fmt(y1, opts.logY), 4, pad.t + 10);
  ctx.fillText(fmt(y0, opts.logY), 4, height - pad.b);
  ctx.fillText(fmt(x0, opts.logX), pad.l, height - 8);
  ctx.fillText(fmt(x1, opts.logX), width - pad.r - 40, height - 8);

  let legendY = pad.t + 14;
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ?? []);
    ctx.lineWidth = s.width ?? 1.6;
    ctx.beginPath();
    let pen = false;
    s.x.forEach((x, i) => {
      const y = s.y[i];
      if (y == null || !isFinite(ty(y))) { pen = false; return; }
      if (pen) ctx.lineTo(px(x), py(y)); else ctx.moveTo(px(x), py(y));
      pen = !s.gap?.(i);
      if (s.markers) ctx.fillRect(px(x) - 2.5, py(y) - 2.5, 5, 5);
    });
    ctx.stroke();
    ctx.setLineDash([]);
    if (s.label) {
      ctx.fillStyle = s.color;
      ctx.fillText(s.label, width - pad.r - 170, legendY);
      legendY += 14;
    }
  }
}

// simulation

let sim = null;

function simConfig() {
  const geometry = $("sim-geometry").value === "case1"
    ? { case: "case1", l1: 1, l2: 1, n1: 100, n2: 100 }
    : { case: "case2", a: 0.5, b: 1, n1: 100, n2: 50 };
  const initial = {
    mismatched: { kind: "mismatched", u_level: 0.5, v_level: -0.3, amplitude: 0.2, modes: 3 },
    step: { kind: "step", left: 0.8, right: -0.6, position: 0 },
    smooth_matched: { kind: "smooth_matched", level: 0.1, amplitude: 0.7, modes: 3 },
  }[$("sim-initial").value];
  const a = Number($("sim-alpha").value);
  const alpha = $("sim-alpha-kind").value === "constant"
    ? { kind: "constant", value: a }
    : { kind: "blowup", alpha0: a, t_star: Number($("sim-tstar").value), p: 1 };
  return {
    geometry,
    physics: { beta: { kind: "cubic" }, pi: { kind: "allen_cahn" }, initial },
    alpha,
    time: { t_final: Number($("sim-t").value), dt: 0.001 },
  };
}

function drawFrame(k) {
  if (!sim) return;
  const all = sim.u.flat().concat(sim.v.flat());
  const range = [Math.min(...all), Math.max(...all)];
  // Ω₂ may consist of two pieces; break the line between them
  const vGap = (i) => sim.x_v[i + 1] - sim.x_v[i] > 0.5;
  plot($("sim-canvas"), [
    { x: sim.x_u, y: sim.u[k], color: COLORS[0], label: "u on Ω₁", width: 2 },
    { x: sim.x_v, y: sim.v[k], color: COLORS[1], label: "v on Ω₂", width: 2, gap: vGap },
  ], { yRange: range });
  const t = sim.times[k];
  status("sim-status",
    `t = ${t.toFixed(4)}   α = ${sim.alpha[k].toPrecision(4)}   jump = ${sim.jump[k].toExponential(3)}   ` +
    `mass = ${sim.mass[k].toFixed(10)}   Newton iterations = ${sim.newton_iterations}` +
    (sim.handoff_time != null ? `   hand-off at t = ${sim.handoff_time}` : ""));
  const maxE = Math.max(...sim.energy, 1e-300);
  plot($("sim-trace"), [
    { x: sim.times, y: sim.energy.map((e) => e / maxE), color: COLORS[2], label: "energy (scaled)" },
    { x: sim.times, y: sim.jump.map((j) => j / Math.max(...sim.jump, 1e-300)), color: COLORS[3], label: "interface jump (scaled)" },
    { x: [t, t], y: [0, 1], color: "#aaa", dash: [3, 3] },
  ], { yRange: [0, 1] });
}

function runSimulation() {
  try {
    const started = performance.now();
    sim = JSON.parse(simulate(JSON.stringify(simConfig()), $("sim-regime").value));
    $("sim-frame").max = sim.times.length - 1;
    $("sim-frame").value = 0;
    drawFrame(0);
    let k = 0;
    const tick = () => {
      if (k >= sim.times.length) return;
      $("sim-frame").value = k;
      drawFrame(k++);
      requestAnimationFrame(tick);
    };
    requestAnimationFrame(tick);
    console.log(`simulate: ${(performance.now() - started).toFixed(0)} ms`);
  } catch (e) {
    sim = null;
    status("sim-status", String(e), true);
  }
}

// rate study

function runRates() {
  const direction = $("rate-direction").value;
  const count = Math.max(2, Math.min(9, Number($("rate-count").value)));
  const [lo, hi] = direction === "to_zero" ? [-4, -1] : [1, 4];
  const alphas = Array.from({ length: count }, (_, i) => 10 ** (lo + ((hi - lo) * i) / (count - 1)));
  status("rate-status", "running…");
  setTimeout(() => {
    try {
      const r = JSON.parse(rate_study(JSON.stringify({ direction, n: 100, dt: Number($("rate-dt").value), alphas })));
      const series = [
        { x: r.alphas, y: r.e_c, color: COLORS[0], markers: true, label: "max L² error" },
        { x: r.alphas, y: r.e_e, color: COLORS[1], markers: true, label: "energy-norm error" },
      ];
      if (r.fit) {
        // reference slope ½ through the first point
        const sign = direction === "to_zero" ? 1 : -1;
        const ref = r.alphas.map((a) => r.e_c[0] * (a / r.alphas[0]) ** (0.5 * sign));
        series.push({ x: r.alphas, y: ref, color: "#888", dash: [5, 4], label: "slope ½ reference" });
      }
      plot($("rate-canvas"), series, { logX: true, logY: true });
      status("rate-status", r.degenerate
        ? "errors vanish to roundoff: no fit"
        : `fitted slope ${r.fit?.slope.toFixed(4) ?? "n/a"} (L²), ${r.fit_energy?.slope.toFixed(4) ?? "n/a"} (energy)`);
    } catch (e) {
      status("rate-status", String(e), true);
    }
  }, 10);
}

// curves

function drawCurves() {
  const lambda = 10 ** Number($("curve-lambda").value);
  $("curve-lambda-value").textContent = `λ = ${lambda.toPrecision(3)}`;
  try {
    const c = JSON.parse(curves($("curve-graph").value, lambda, 2, 401));
    plot($("curve-canvas"), [
      { x: c.r, y: c.primitive, color: "#888", dash: [5, 4], label: "j" },
      { x: c.r, y: c.moreau, color: COLORS[0], label: "Moreau envelope j_λ" },
      { x: c.r, y: c.yosida, color: COLORS[1], label: "Yosida β_λ" },
      { x: c.r, y: c.resolvent, color: COLORS[2], label: "resolvent J_λ" },
    ], { yRange: [-3, 3] });
  } catch (e) {
    console.error(e);
  }
}

await init();
$("sim-run").addEventListener("click", runSimulation);
$("sim-frame").addEventListener("input", (e) => drawFrame(Number(e.target.value)));
$("rate-run").addEventListener("click", runRates);
$("curve-graph").addEventListener("change", drawCurves);
$("curve-lambda").addEventListener("input", drawCurves);
drawCurves();
runSimulation();
