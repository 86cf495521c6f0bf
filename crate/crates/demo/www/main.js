// Expects the wasm-bindgen output in ./pkg (see the README).
import init, { Demo } from "./pkg/trajgram_demo.js";

const $ = (id) => document.getElementById(id);
const canvas = $("grid");
const ctx = canvas.getContext("2d");
let demo = null;
let overlay = null;

function scale() {
  return canvas.width / demo.side();
}

function toCell(event) {
  const box = canvas.getBoundingClientRect();
  const s = scale();
  return [Math.floor((event.clientX - box.left) / s), Math.floor((event.clientY - box.top) / s)];
}

function instant() {
  return Number($("t").value);
}

function draw() {
  if (!demo) return;
  const s = scale();
  const n = demo.side();
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const all = demo.time_slice(0, 0, n - 1, n - 1, instant());
  ctx.fillStyle = "#888";
  for (let i = 0; i < all.length; i += 3) {
    ctx.fillRect(all[i + 1] * s, all[i + 2] * s, Math.max(s, 2), Math.max(s, 2));
  }
  if (overlay) overlay(s);
}

function showIds(lines, ids) {
  const out = $("result");
  out.textContent = "";
  out.append(lines.shift() + "\n");
  lines.forEach((line, i) => {
    const link = document.createElement("a");
    link.href = "#";
    link.textContent = line;
    link.onclick = (e) => {
      e.preventDefault();
      showTrajectory(ids[i]);
    };
    out.append(link, "\n");
  });
}

function timeSlice(a, b) {
  const [x1, x2] = [Math.min(a[0], b[0]), Math.max(a[0], b[0])];
  const [y1, y2] = [Math.min(a[1], b[1]), Math.max(a[1], b[1])];
  const t = instant();
  const hits = demo.time_slice(x1, y1, x2, y2, t);
  const lines = [`time slice [${x1},${x2}]x[${y1},${y2}] at t=${t}: ${hits.length / 3} objects`];
  const ids = [];
  for (let i = 0; i < hits.length; i += 3) {
    lines.push(`object ${hits[i]} at (${hits[i + 1]}, ${hits[i + 2]})`);
    ids.push(hits[i]);
  }
  overlay = (s) => {
    ctx.strokeStyle = "#06c";
    ctx.strokeRect(x1 * s, y1 * s, (x2 - x1 + 1) * s, (y2 - y1 + 1) * s);
    ctx.fillStyle = "#06c";
    for (let i = 0; i < hits.length; i += 3) ctx.fillRect(hits[i + 1] * s, hits[i + 2] * s, Math.max(s, 3), Math.max(s, 3));
  };
  showIds(lines, ids);
  draw();
}

function nearest(cell) {
  const t = instant();
  const k = Number($("k").value);
  const found = demo.knn(cell[0], cell[1], t, k);
  const lines = [`${k} nearest to (${cell[0]}, ${cell[1]}) at t=${t}`];
  const ids = [];
  for (let i = 0; i < found.length; i += 2) {
    lines.push(`object ${found[i]} at distance ${found[i + 1].toFixed(3)}`);
    ids.push(found[i]);
  }
  const positions = demo.time_slice(0, 0, demo.side() - 1, demo.side() - 1, t);
  const where = new Map();
  for (let i = 0; i < positions.length; i += 3) where.set(positions[i], [positions[i + 1], positions[i + 2]]);
  overlay = (s) => {
    ctx.strokeStyle = "#c30";
    for (const id of ids) {
      const [x, y] = where.get(id);
      ctx.beginPath();
      ctx.moveTo((cell[0] + 0.5) * s, (cell[1] + 0.5) * s);
      ctx.lineTo((x + 0.5) * s, (y + 0.5) * s);
      ctx.stroke();
    }
  };
  showIds(lines, ids);
  draw();
}

function showTrajectory(id) {
  const path = demo.trajectory(id, 0, demo.instants() - 1);
  overlay = (s) => {
    ctx.strokeStyle = "#090";
    ctx.beginPath();
    let last = -2;
    for (let i = 0; i < path.length; i += 3) {
      const [t, x, y] = [path[i], (path[i + 1] + 0.5) * s, (path[i + 2] + 0.5) * s];
      if (t === last + 1) ctx.lineTo(x, y);
      else ctx.moveTo(x, y);
      last = t;
    }
    ctx.stroke();
  };
  $("result").textContent = `object ${id}: ${path.length / 3} positions`;
  draw();
}

function build() {
  try {
    demo = new Demo($("kind").value, Number($("seed").value), Number($("objects").value),
      Number($("instants").value), Number($("side").value), Number($("period").value));
  } catch (e) {
    $("summary").textContent = String(e);
    return;
  }
  $("t").max = demo.instants() - 1;
  $("t").value = 0;
  $("t-label").textContent = "0";
  $("summary").textContent = demo.summary();
  $("result").textContent = "";
  overlay = null;
  draw();
}

let pressed = null;
canvas.addEventListener("mousedown", (e) => { if (demo) pressed = toCell(e); });
canvas.addEventListener("mouseup", (e) => {
  if (!pressed) return;
  const cell = toCell(e);
  if (cell[0] === pressed[0] && cell[1] === pressed[1]) nearest(cell);
  else timeSlice(pressed, cell);
  pressed = null;
});
$("t").addEventListener("input", () => {
  $("t-label").textContent = $("t").value;
  overlay = null;
  draw();
});
$("build").addEventListener("click", build);

await init();
build();
