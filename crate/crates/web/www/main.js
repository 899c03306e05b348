import init, { centrality_profile, seeding_sweep, allocation_threshold } from "./pkg/netgame_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function setup() {
  return [$("kind").value, num("n"), num("l"), num("seed"), num("alpha"), num("beta"), num("delta")];
}

function axes(ctx, w, h, pad, yMax, label) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, 10);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - 10, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.fillText(yMax.toFixed(2), 4, 16);
  ctx.fillText("0", pad - 12, h - pad);
  ctx.fillText(label, w - 120, h - 8);
}

function line(ctx, xs, ys, color, sx, sy) {
  ctx.strokeStyle = color;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
}

function drawProfile() {
  const p = JSON.parse(centrality_profile(...setup()));
  const c = $("profile"), ctx = c.getContext("2d");
  const pad = 30, n = p.sorted.length;
  const yMax = Math.max(...p.upper) * 1.05;
  axes(ctx, c.width, c.height, pad, yMax, "rank");
  const bw = (c.width - pad - 20) / n;
  const sy = (y) => c.height - pad - (y / yMax) * (c.height - pad - 10);
  ctx.fillStyle = "#6a9fd8";
  p.sorted.forEach((v, i) => ctx.fillRect(pad + i * bw + 2, sy(v), bw - 4, c.height - pad - sy(v)));
  const xs = p.sorted.map((_, i) => pad + (i + 0.5) * bw);
  line(ctx, xs, p.upper, "#c33", (x) => x, sy);
  line(ctx, xs, p.lower, "#393", (x) => x, sy);
}

function drawSweep() {
  const s = JSON.parse(seeding_sweep(...setup(), num("kmin"), num("kmax"), 200, num("cs"), num("cq")));
  const c = $("sweep"), ctx = c.getContext("2d");
  const pad = 30;
  const ks = s.points.map((q) => q.budget);
  const yMax = Math.max(...s.points.map((q) => q.max_seeding), 0.5) * 1.05;
  axes(ctx, c.width, c.height, pad, yMax, "budget K");
  const k0 = ks[0], k1 = ks[ks.length - 1] || k0 + 1;
  const sx = (k) => pad + ((k - k0) / (k1 - k0 || 1)) * (c.width - pad - 20);
  const sy = (y) => c.height - pad - (y / yMax) * (c.height - pad - 10);
  ctx.strokeStyle = "#ddd";
  s.regime_endpoints.filter((e) => e >= k0 && e <= k1).forEach((e) => {
    ctx.beginPath();
    ctx.moveTo(sx(e), 10);
    ctx.lineTo(sx(e), c.height - pad);
    ctx.stroke();
  });
  line(ctx, ks, s.points.map((q) => q.max_seeding), "#c33", sx, sy);
  line(ctx, ks, s.points.map((q) => q.min_seeding), "#393", sx, sy);
  ctx.lineWidth = 2;
  line(ctx, ks, s.points.map((q) => q.seeding), "#2b5fa8", sx, sy);
  ctx.lineWidth = 1;
}

function drawAlloc() {
  const a = JSON.parse(allocation_threshold(...setup(), num("qa"), num("qb"), num("budget"), num("cs"), num("cq")));
  $("thresholds").textContent =
    `v_c(a) = ${a.v_c_a.toFixed(4)}, v_c(b) = ${a.v_c_b.toFixed(4)}; ` +
    `quality gains: a ${a.quality_gain_a.toFixed(4)}, b ${a.quality_gain_b.toFixed(4)}`;
  const c = $("alloc"), ctx = c.getContext("2d");
  const pad = 30, n = a.centralities.length;
  const yMax = Math.max(...a.centralities, a.v_c_a, a.v_c_b) * 1.05;
  axes(ctx, c.width, c.height, pad, yMax, "agent");
  const bw = (c.width - pad - 20) / n;
  const sy = (y) => c.height - pad - (y / yMax) * (c.height - pad - 10);
  a.centralities.forEach((v, i) => {
    const seeded = a.seeding_a[i] > 0 || a.seeding_b[i] > 0;
    ctx.fillStyle = seeded ? "#e08a2c" : "#bbb";
    ctx.fillRect(pad + i * bw + 2, sy(v), bw - 4, c.height - pad - sy(v));
  });
  for (const [v, color] of [[a.v_c_a, "#c33"], [a.v_c_b, "#2b5fa8"]]) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    ctx.moveTo(pad, sy(v));
    ctx.lineTo(c.width - 10, sy(v));
    ctx.stroke();
  }
}

function redraw() {
  $("error").textContent = "";
  for (const f of [drawProfile, drawSweep, drawAlloc]) {
    try {
      f();
    } catch (e) {
      $("error").textContent += `${f.name}: ${e}\n`;
    }
  }
}

await init();
document.querySelectorAll("input, select").forEach((el) => el.addEventListener("change", redraw));
redraw();
