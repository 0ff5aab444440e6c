// Wire protocol v1: JSON objects, one per WebSocket text frame. Every client
// message is answered by exactly one reply, in order.

export const PROTOCOL_VERSION = 1;

export type Vec = [number, number, number];

export interface HelloMsg {
  type: "hello";
  version: number;
  L: number;
  body_mass: number;
}

export interface HelloAck {
  type: "hello";
  version: number;
  session: string;
}

export interface FrameMsg {
  type: "frame";
  t: number;
  pointer_x: number;
  pointer_y: number;
}

export interface SetParamsMsg {
  type: "set_params";
  T_f?: number;
  DR_alpha?: number;
  theta_1?: number;
  beta_step?: number;
}

export interface StateMsg {
  type: "state";
  t: number;
  p_r: Vec;
  p_v: Vec;
  F: number;
  theta: number;
  alpha: number;
  beta: number;
}

export interface ErrorMsg {
  type: "error";
  code: string;
  detail: string;
}

export type ServerMsg = HelloAck | StateMsg | ErrorMsg;

function isVec(value: unknown): value is Vec {
  return (
    Array.isArray(value) &&
    value.length === 3 &&
    value.every((c) => typeof c === "number" && Number.isFinite(c))
  );
}

export function parseServerMessage(raw: string): ServerMsg | null {
  let msg: unknown;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null) return null;
  const m = msg as Record<string, unknown>;
  if (m.type === "error" && typeof m.code === "string") {
    return { type: "error", code: m.code, detail: String(m.detail ?? "") };
  }
  if (m.type === "hello" && typeof m.session === "string") {
    return { type: "hello", version: Number(m.version), session: m.session };
  }
  if (
    m.type === "state" &&
    typeof m.t === "number" &&
    isVec(m.p_r) &&
    isVec(m.p_v) &&
    typeof m.F === "number" &&
    typeof m.theta === "number" &&
    typeof m.alpha === "number" &&
    typeof m.beta === "number"
  ) {
    return {
      type: "state",
      t: m.t,
      p_r: m.p_r,
      p_v: m.p_v,
      F: m.F,
      theta: m.theta,
      alpha: m.alpha,
      beta: m.beta,
    };
  }
  return null;
}

// --- engine math replicated client-side for conformance monitoring ---
// Same formulas and operation order as the service, so agreement is limited
// only by JSON number round-tripping (exact for IEEE doubles).

export function thetaOfAlpha(alpha: number, theta0: number, theta1: number): number {
  const theta = (1 - alpha) * theta0 + alpha * theta1;
  const lo = Math.min(theta0, theta1);
  const hi = Math.max(theta0, theta1);
  return Math.min(hi, Math.max(lo, theta));
}

export function blendedReachMap(
  p_r: Vec,
  theta: number,
  beta: number,
  k: number,
  L: number,
): Vec {
  if (beta === 0) return p_r;
  const r = Math.sqrt(p_r[0] * p_r[0] + p_r[1] * p_r[1] + p_r[2] * p_r[2]);
  const d = theta * L;
  let manip: Vec;
  if (r <= d || k === 0 || r === 0) {
    manip = p_r;
  } else {
    const excess = r - d;
    const rv = r + k * excess * excess;
    manip = [(p_r[0] / r) * rv, (p_r[1] / r) * rv, (p_r[2] / r) * rv];
  }
  const w = 1 - beta;
  return [
    w * p_r[0] + beta * manip[0],
    w * p_r[1] + beta * manip[1],
    w * p_r[2] + beta * manip[2],
  ];
}

export interface ConformanceReport {
  checked: number;
  mismatches: number;
  worstThetaError: number;
  worstPositionError: number;
}

/** Recomputes the theta/alpha relation and the position mapping for every
 * state message; any disagreement beyond the tolerance is a conformance
 * mismatch worth surfacing. */
export class ConformanceMonitor {
  readonly tolerance: number;
  private theta0: number;
  private k: number;
  private L: number;
  private report: ConformanceReport = {
    checked: 0,
    mismatches: 0,
    worstThetaError: 0,
    worstPositionError: 0,
  };

  constructor(theta0: number, k: number, L: number, tolerance = 1e-6) {
    this.theta0 = theta0;
    this.k = k;
    this.L = L;
    this.tolerance = tolerance;
  }

  check(state: StateMsg, theta1: number): boolean {
    const expectedTheta = thetaOfAlpha(state.alpha, this.theta0, theta1);
    const thetaError = Math.abs(expectedTheta - state.theta);
    const expected = blendedReachMap(state.p_r, state.theta, state.beta, this.k, this.L);
    let positionError = 0;
    for (let i = 0; i < 3; i++) {
      positionError = Math.max(positionError, Math.abs(expected[i]! - state.p_v[i]!));
    }
    this.report.checked += 1;
    this.report.worstThetaError = Math.max(this.report.worstThetaError, thetaError);
    this.report.worstPositionError = Math.max(this.report.worstPositionError, positionError);
    const ok = thetaError <= this.tolerance && positionError <= this.tolerance;
    if (!ok) this.report.mismatches += 1;
    return ok;
  }

  snapshot(): ConformanceReport {
    return { ...this.report };
  }
}
