import init, { Explorer } from "./pkg/ibx_web.js";

const $ = (id) => document.getElementById(id);
let explorer = null;

function report(message, isError = false) {
  $("status").textContent = message;
  $("status").className = isError ? "error" : "";
}

function pair(text) {
  const [x, y] = text.split(",").map((s) => Number.parseInt(s.trim(), 10));
  if (!Number.isInteger(x) || !Number.isInteger(y)) throw new Error(`expected "x,y", got "${text}"`);
  return [x, y];
}

function paint() {
  const index = Number($("point").value);
  const [w, h] = explorer.heatmapSize();
  const canvas = $("heatmap");
  canvas.width = w;
  canvas.height = h;
  const pixels = new Uint8ClampedArray(explorer.heatmapRgba(index));
  canvas.getContext("2d").putImageData(new ImageData(pixels, w, h), 0, 0);
  if (index < 0) {
    $("point-label").textContent = "true reward";
  } else {
    const row = JSON.parse(explorer.pointsJson())[index];
    $("point-label").textContent =
      `${row.n_clusters} clusters, ${row.complexity_bits.toFixed(3)} bits, MSE ${row.distortion_mse.toFixed(4)}`;
  }
}

function sweep() {
  report("sweeping...");
  // Let the status paint before the synchronous sweep blocks the thread.
  setTimeout(() => {
    try {
      explorer?.free();
      explorer = new Explorer($("target").value, $("objective").value, Number($("seed").value));
      $("frontier").innerHTML = explorer.frontierSvg();
      const slider = $("point");
      slider.max = String(explorer.pointCount() - 1);
      slider.value = "-1";
      paint();
      report(`${explorer.pointCount()} frontier points`);
    } catch (e) {
      explorer = null;
      report(String(e.message ?? e), true);
    }
  }, 0);
}

function probe() {
  if (!explorer) return;
  const index = Math.max(0, Number($("point").value));
  try {
    const [sx, sy] = pair($("start").value);
    const [gx, gy] = pair($("goal").value);
    const result = JSON.parse(explorer.probeJson(index, sx, sy, gx, gy, Number($("task-seed").value)));
    $("metrics").textContent = JSON.stringify(result, null, 2);
    $("metrics").className = "";
  } catch (e) {
    $("metrics").textContent = String(e.message ?? e);
    $("metrics").className = "error";
  }
}

await init();
$("sweep").addEventListener("click", sweep);
$("point").addEventListener("input", () => explorer && paint());
$("probe").addEventListener("click", probe);
sweep();
