// Canvas drawing. Top-down planar projection: the shoulder anchor sits at
// the bottom center, lateral position maps to screen x and forward reach to
// screen up, matching the service's inclination-0 pointer mapping.

import { TraceBuffer, ViewState } from "./model.js";

const PHYSICAL_COLOR = "#3a86ff";
const VIRTUAL_COLOR = "#fb5607";
const GRID_COLOR = "#2b2d42";

export interface CanvasLike {
  width: number;
  height: number;
  getContext(kind: "2d"): CanvasRenderingContext2D | null;
}

function project(
  p: readonly number[],
  scale: number,
  cx: number,
  cy: number,
): [number, number] {
  return [cx + p[0]! * scale, cy - p[2]! * scale];
}

function drawSparkline(
  ctx: CanvasRenderingContext2D,
  trace: TraceBuffer,
  x: number,
  y: number,
  w: number,
  h: number,
  lo: number,
  hi: number,
  color: string,
  label: string,
): void {
  ctx.strokeStyle = "#4a4e69";
  ctx.strokeRect(x, y, w, h);
  ctx.fillStyle = "#9a8c98";
  ctx.font = "11px sans-serif";
  ctx.fillText(label, x + 4, y + 12);
  const values = trace.toArray();
  if (values.length < 2) return;
  ctx.strokeStyle = color;
  ctx.beginPath();
  values.forEach((v, i) => {
    const sx = x + (i / (trace.capacity - 1)) * w;
    const clamped = Math.min(hi, Math.max(lo, v));
    const sy = y + h - ((clamped - lo) / (hi - lo)) * h;
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.stroke();
}

export function renderFrame(view: ViewState, canvas: CanvasLike): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#0d1b2a";
  ctx.fillRect(0, 0, w, h);

  const cx = w / 2;
  const cy = h - 30;
  const scale = (h - 90) / view.armLength;

  // reach circle at one arm length plus the shoulder anchor
  ctx.strokeStyle = GRID_COLOR;
  ctx.beginPath();
  ctx.arc(cx, cy, view.armLength * scale, Math.PI, 2 * Math.PI);
  ctx.stroke();
  ctx.fillStyle = "#778da9";
  ctx.beginPath();
  ctx.arc(cx, cy, 4, 0, 2 * Math.PI);
  ctx.fill();

  const state = view.lastState;
  if (state) {
    const pr = project(state.p_r, scale, cx, cy);
    const pv = project(state.p_v, scale, cx, cy);

    ctx.strokeStyle = "#e0e1dd";
    ctx.beginPath();
    ctx.moveTo(pr[0], pr[1]);
    ctx.lineTo(pv[0], pv[1]);
    ctx.stroke();

    ctx.fillStyle = PHYSICAL_COLOR;
    ctx.beginPath();
    ctx.arc(pr[0], pr[1], 7, 0, 2 * Math.PI);
    ctx.fill();

    ctx.strokeStyle = VIRTUAL_COLOR;
    ctx.lineWidth = 2.5;
    ctx.beginPath();
    ctx.arc(pv[0], pv[1], 9, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.lineWidth = 1;

    // fatigue gauge
    const gaugeW = 18;
    const gaugeH = h - 60;
    ctx.strokeStyle = "#4a4e69";
    ctx.strokeRect(w - 34, 30, gaugeW, gaugeH);
    const fill = (Math.min(100, Math.max(0, state.F)) / 100) * gaugeH;
    ctx.fillStyle = state.F > 50 ? "#e63946" : "#52b788";
    ctx.fillRect(w - 34, 30 + gaugeH - fill, gaugeW, fill);
    ctx.fillStyle = "#e0e1dd";
    ctx.font = "11px sans-serif";
    ctx.fillText("F%", w - 32, 24);

    ctx.fillStyle = "#e0e1dd";
    ctx.font = "13px monospace";
    const offset = Math.hypot(
      state.p_v[0] - state.p_r[0],
      state.p_v[1] - state.p_r[1],
      state.p_v[2] - state.p_r[2],
    );
    ctx.fillText(`F     ${state.F.toFixed(2)}%`, 12, 20);
    ctx.fillText(`theta ${state.theta.toFixed(4)}`, 12, 36);
    ctx.fillText(`alpha ${state.alpha.toFixed(4)}`, 12, 52);
    ctx.fillText(`beta  ${state.beta.toFixed(3)}`, 12, 68);
    ctx.fillText(`gap   ${(offset * 100).toFixed(1)} cm`, 12, 84);
  }

  drawSparkline(ctx, view.fatigueTrace, 12, h - 76, 150, 30, 0, 40, "#52b788", "F (10 s)");
  drawSparkline(ctx, view.thetaTrace, 12, h - 40, 150, 30, 0, 1.05, VIRTUAL_COLOR, "theta (10 s)");

  if (view.conformanceWarning) {
    ctx.fillStyle = "#e63946";
    ctx.font = "bold 12px sans-serif";
    ctx.fillText("TELEMETRY MISMATCH", w - 170, 20);
  }
  if (view.pendingParams) {
    ctx.fillStyle = "#ffd166";
    ctx.font = "12px sans-serif";
    ctx.fillText("params pending…", cx - 40, 24);
  }
  if (view.lastError) {
    ctx.fillStyle = "#e63946";
    ctx.font = "12px sans-serif";
    ctx.fillText(view.lastError, 12, h - 86);
  }

  if (view.status !== "open") {
    ctx.fillStyle = "rgba(13, 27, 42, 0.82)";
    ctx.fillRect(0, 0, w, h);
    ctx.fillStyle = "#e0e1dd";
    ctx.font = "16px sans-serif";
    const note =
      view.status === "connecting" ? "connecting…" : "disconnected — click to reconnect";
    ctx.fillText(note, cx - 90, h / 2);
  }
}
