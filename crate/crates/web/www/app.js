import init, { geometry, simulate, sic_sweep } from "./pkg/leo_tdd_web.js";

const COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
const $ = (id) => document.getElementById(id);

function status(msg, isError = false) {
  $("status").textContent = msg;
  $("status").className = isError ? "err" : "";
}

function fmt(x) {
  return Number.isFinite(x) ? Number(x.toPrecision(6)).toString() : String(x);
}

// Shows `busy`, lets the browser repaint, then runs the (blocking) wasm call.
function guarded(fn, busy) {
  return () => {
    if (busy) status(busy);
    setTimeout(() => {
      try {
        fn();
      } catch (e) {
        status(String(e), true);
      }
    }, 20);
  };
}

// Axes with linear scales; returns data -> pixel mappers.
function axes(ctx, xr, yr, xlabel, ylabel) {
  const { width: w, height: h } = ctx.canvas;
  const m = { l: 60, r: 160, t: 15, b: 40 };
  const sx = (x) => m.l + ((x - xr[0]) / (xr[1] - xr[0])) * (w - m.l - m.r);
  const sy = (y) => h - m.b - ((y - yr[0]) / (yr[1] - yr[0])) * (h - m.t - m.b);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.strokeRect(m.l, m.t, w - m.l - m.r, h - m.t - m.b);
  for (let i = 0; i <= 5; i++) {
    const x = xr[0] + (i / 5) * (xr[1] - xr[0]);
    const y = yr[0] + (i / 5) * (yr[1] - yr[0]);
    ctx.fillText(fmt(x), sx(x) - 12, h - m.b + 16);
    ctx.fillText(fmt(y), 8, sy(y) + 4);
  }
  ctx.fillText(xlabel, (w - m.r) / 2, h - 6);
  ctx.save();
  ctx.translate(14, h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();
  return { sx, sy, legendX: w - m.r + 10, top: m.t };
}

function legend(ctx, ax, labels) {
  labels.forEach((label, i) => {
    ctx.fillStyle = COLORS[i % COLORS.length];
    ctx.fillRect(ax.legendX, ax.top + 8 + i * 18, 12, 3);
    ctx.fillStyle = "#333";
    ctx.fillText(label, ax.legendX + 18, ax.top + 13 + i * 18);
  });
}

function showGeometry() {
  const r = JSON.parse(geometry(+$("alt").value, +$("elev").value, +$("fc").value));
  const rows = [
    ["orbital velocity", r.orbital_velocity_km_s, "km/s"],
    ["max slant range", r.max_slant_range_km, "km"],
    ["one-way delay", `${fmt(r.min_delay_ms)} to ${fmt(r.max_delay_ms)}`, "ms"],
    ["differential delay", r.differential_delay_ms, "ms"],
    ["required guard period", r.required_guard_period_ms, "ms"],
    ["max Doppler shift", r.max_doppler_khz, "kHz"],
    ["coverage radius", r.coverage_radius_km, "km"],
  ];
  $("geom").innerHTML = rows
    .map(([k, v, u]) => `<tr><td>${k}</td><td class="v">${typeof v === "number" ? fmt(v) : v}</td><td>${u}</td></tr>`)
    .join("");
  status("geometry updated");
}

function showSimulation() {
  const t0 = performance.now();
  const sim = JSON.parse(simulate($("overrides").value));
  const xs = sim.curves.flatMap((c) => c.points.map((p) => p[0]));
  const xr = [Math.min(0.5, ...xs), Math.max(1.5, ...xs)];
  const ctx = $("cdf").getContext("2d");
  const ax = axes(ctx, xr, [0, 1], "throughput ratio TDD / FDD", "CDF");

  ctx.setLineDash([4, 4]);
  ctx.strokeStyle = "#000";
  ctx.beginPath();
  ctx.moveTo(ax.sx(1), ax.sy(0));
  ctx.lineTo(ax.sx(1), ax.sy(1));
  ctx.stroke();
  ctx.setLineDash([]);

  sim.curves.forEach((c, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = 2;
    ctx.beginPath();
    let prev = 0;
    c.points.forEach(([x, p], k) => {
      if (k === 0) ctx.moveTo(ax.sx(x), ax.sy(0));
      ctx.lineTo(ax.sx(x), ax.sy(prev));
      ctx.lineTo(ax.sx(x), ax.sy(p));
      prev = p;
    });
    ctx.stroke();
  });
  ctx.lineWidth = 1;
  legend(ctx, ax, sim.curves.map((c) => c.label));

  $("frac").innerHTML =
    "<tr><td><b>scheme</b></td><td><b>share of UEs beating FDD</b></td></tr>" +
    sim.curves.map((c) => `<tr><td>${c.label}</td><td class="v">${fmt(c.fraction_above_one)}</td></tr>`).join("");
  status(`${sim.num_ues} UEs in ${fmt((performance.now() - t0) / 1000)} s`);
}

function showSweep() {
  const s = JSON.parse(sic_sweep($("overrides").value, $("sic").value));
  const ctx = $("sweep").getContext("2d");
  const xr = [Math.min(...s.values), Math.max(...s.values)];
  if (xr[0] === xr[1]) xr[1] = xr[0] + 1;
  const ax = axes(ctx, xr, [0, 1], "SIC (dB)", "fraction > 1");
  s.slots.forEach((slot, i) => {
    ctx.strokeStyle = ctx.fillStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = 2;
    ctx.beginPath();
    s.values.forEach((v, k) => {
      const [x, y] = [ax.sx(v), ax.sy(s.fraction_above_one[i][k])];
      k === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.stroke();
    s.values.forEach((v, k) => ctx.fillRect(ax.sx(v) - 3, ax.sy(s.fraction_above_one[i][k]) - 3, 6, 6));
  });
  ctx.lineWidth = 1;
  legend(ctx, ax, s.slots);
  status("sweep done");
}

await init();
$("geom-btn").onclick = guarded(showGeometry);
$("sim-btn").onclick = guarded(showSimulation, "simulating…");
$("sweep-btn").onclick = guarded(showSweep, "sweeping…");
guarded(showGeometry)();
guarded(showSimulation, "simulating…")();
