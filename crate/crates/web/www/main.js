import init, { polygon_trajectory, corner_gap_sweep, wedge_fan } from "./pkg/billiards_web.js";

const TABLES = {
  square: [[0, 0], [1, 0], [1, 1], [0, 1]],
  a2: [[0, 0], [1, 0], [0.5, Math.sqrt(3) / 2]],
  c2: [[0, 0], [1, 0], [0, 1]],
  g2: [[0, 0], [1, 0], [0, 1 / Math.sqrt(3)]],
  two_fifths: [[0, 0], [1, 0], [Math.cos(2 * Math.PI / 5), Math.sin(2 * Math.PI / 5)]],
  pentagon: [0, 1, 2, 3, 4].map((k) => [Math.cos(2 * Math.PI * k / 5 + Math.PI / 2), Math.sin(2 * Math.PI * k / 5 + Math.PI / 2)]),
};

function frame(canvas, pts) {
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => p[1]);
  const [x0, x1, y0, y1] = [Math.min(...xs), Math.max(...xs), Math.min(...ys), Math.max(...ys)];
  const span = Math.max(x1 - x0, y1 - y0);
  const s = (canvas.width * 0.9) / span;
  const ox = canvas.width * 0.05 - x0 * s + (span - (x1 - x0)) * s / 2;
  const oy = canvas.height * 0.95 + y0 * s - (span - (y1 - y0)) * s / 2;
  return {
    to: (p) => [ox + p[0] * s, oy - p[1] * s],
    from: (x, y) => [(x - ox) / s, (oy - y) / s],
  };
}

function polyline(ctx, f, pts, close) {
  ctx.beginPath();
  pts.forEach((p, i) => {
    const [x, y] = f.to(p);
    i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
  });
  if (close) ctx.closePath();
}

// Trajectory panel.
const traj = document.getElementById("traj");
const tctx = traj.getContext("2d");
let drag = null;

function drawTable(path) {
  const pts = TABLES[document.getElementById("table").value];
  const f = frame(traj, pts);
  tctx.clearRect(0, 0, traj.width, traj.height);
  polyline(tctx, f, pts, true);
  tctx.fillStyle = "#f4f1e8";
  tctx.fill();
  tctx.strokeStyle = "#000";
  tctx.lineWidth = 2;
  tctx.stroke();
  if (path) {
    polyline(tctx, f, path, false);
    tctx.strokeStyle = "#b03030";
    tctx.lineWidth = 1;
    tctx.stroke();
  }
  return f;
}

function launch(start, dir) {
  const pts = TABLES[document.getElementById("table").value];
  const info = document.getElementById("traj-info");
  try {
    const run = polygon_trajectory(new Float64Array(pts.flat()), start[0], start[1], dir[0], dir[1],
      Number(document.getElementById("horizon").value));
    const flat = run.path;
    const path = [];
    for (let i = 0; i < flat.length; i += 2) path.push([flat[i], flat[i + 1]]);
    drawTable(path);
    info.textContent = `${path.length - 2} bounces; ` +
      (run.alcove ? `alcove of type ${run.alcove}, corners continue by folding` : "not an alcove");
  } catch (e) {
    drawTable(null);
    info.textContent = String(e.message || e);
  }
}

traj.addEventListener("mousedown", (e) => { drag = [e.offsetX, e.offsetY]; });
traj.addEventListener("mouseup", (e) => {
  if (!drag) return;
  const f = drawTable(null);
  const a = f.from(...drag);
  const b = f.from(e.offsetX, e.offsetY);
  drag = null;
  const d = [b[0] - a[0], b[1] - a[1]];
  if (Math.hypot(...d) > 1e-6) launch(a, d);
});
document.getElementById("table").addEventListener("change", () => {
  drawTable(null);
  document.getElementById("traj-info").textContent = "Drag inside the table to launch a ball.";
});

// Gap curve.
function drawGap() {
  const canvas = document.getElementById("gap");
  const ctx = canvas.getContext("2d");
  const lo = 0.15, hi = Math.PI - 0.05, n = 2000;
  const data = corner_gap_sweep(lo, hi, n);
  const X = (a) => 30 + (a - lo) / (hi - lo) * (canvas.width - 40);
  const Y = (g) => canvas.height - 20 - g / Math.PI * (canvas.height - 30);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#ccc";
  for (let k = 2; Math.PI / k > lo; k++) {
    ctx.beginPath();
    ctx.moveTo(X(Math.PI / k), Y(0));
    ctx.lineTo(X(Math.PI / k), Y(Math.PI));
    ctx.stroke();
  }
  ctx.strokeStyle = "#2050b0";
  ctx.beginPath();
  for (let i = 0; i < data.length; i += 2) {
    const [x, y] = [X(data[i]), Y(data[i + 1])];
    i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
  }
  ctx.stroke();
  document.getElementById("gap-info").textContent = `alpha from ${lo} to ${hi.toFixed(3)}; grey lines at pi/k`;
}

// Wedge fan.
function drawFan() {
  const canvas = document.getElementById("fan");
  const ctx = canvas.getContext("2d");
  const alpha = Number(document.getElementById("alpha").value);
  const out = wedge_fan(alpha, 1e-9);
  const [up, down, bounces] = out;
  const f = frame(canvas, [[-1.2, -1.2], [1.2, 1.2]]);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const R = 1.2;
  polyline(ctx, f, [[0, 0], [R * Math.cos(alpha / 2), R * Math.sin(alpha / 2)], [R * Math.cos(-alpha / 2), R * Math.sin(-alpha / 2)]], true);
  ctx.fillStyle = "#f4f1e8";
  ctx.fill();
  ctx.strokeStyle = "#000";
  for (let k = 0; (2 * k + 1) * alpha / 2 < Math.PI; k++) {
    for (const s of [1, -1]) {
      const a = s * (2 * k + 1) * alpha / 2;
      polyline(ctx, f, [[0, 0], [R * Math.cos(a), R * Math.sin(a)]], false);
      ctx.stroke();
    }
  }
  for (const [ang, colour] of [[up, "#b03030"], [down, "#2050b0"]]) {
    polyline(ctx, f, [[0, 0], [Math.cos(ang), Math.sin(ang)]], false);
    ctx.strokeStyle = colour;
    ctx.lineWidth = 2;
    ctx.stroke();
    ctx.lineWidth = 1;
  }
  const gap = Math.abs(up - down);
  document.getElementById("fan-info").textContent =
    `${bounces} bounces; exit angles ${up.toFixed(6)} / ${down.toFixed(6)}; gap ${gap.toExponential(3)}`;
}

await init();
drawTable(null);
drawGap();
drawFan();
document.getElementById("alpha").addEventListener("input", drawFan);
