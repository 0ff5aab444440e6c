// View-side state: trace buffers, outbound throttling/debouncing, and the
// acknowledged-vs-pending slider bookkeeping. Everything here is pumped from
// the render loop with explicit timestamps, so it is deterministic in tests.

import { ConformanceMonitor, StateMsg } from "./protocol.js";

/** Fixed-capacity append-only ring of recent samples (sparkline source). */
export class TraceBuffer {
  readonly capacity: number;
  private values: number[] = [];

  constructor(capacity = 600) {
    this.capacity = capacity;
  }

  push(value: number): void {
    this.values.push(value);
    if (this.values.length > this.capacity) {
      this.values.splice(0, this.values.length - this.capacity);
    }
  }

  toArray(): readonly number[] {
    return this.values;
  }

  get length(): number {
    return this.values.length;
  }
}

/** Drops events so at most `maxPerSecond` pass through. The next-slot
 * anchor advances by whole intervals while the stream keeps up, so float
 * jitter in event timestamps cannot eat slots. */
export class RateLimiter {
  private readonly intervalMs: number;
  private nextMs = -Infinity;

  constructor(maxPerSecond: number) {
    this.intervalMs = 1000 / maxPerSecond;
  }

  allow(nowMs: number): boolean {
    if (nowMs < this.nextMs) return false;
    this.nextMs =
      nowMs - this.nextMs > this.intervalMs
        ? nowMs + this.intervalMs
        : this.nextMs + this.intervalMs;
    return true;
  }
}

/** Holds the latest value until the input has been quiet for `delayMs`;
 * `flush` is pumped from the render loop. */
export class Debouncer<T> {
  private readonly delayMs: number;
  private pending: { value: T; dueMs: number } | null = null;

  constructor(delayMs = 100) {
    this.delayMs = delayMs;
  }

  schedule(value: T, nowMs: number): void {
    this.pending = { value, dueMs: nowMs + this.delayMs };
  }

  flush(nowMs: number): T | null {
    if (this.pending && nowMs >= this.pending.dueMs) {
      const value = this.pending.value;
      this.pending = null;
      return value;
    }
    return null;
  }

  get hasPending(): boolean {
    return this.pending !== null;
  }
}

export interface SliderValues {
  T_f: number;
  DR_alpha: number;
  theta_1: number;
}

export type ConnectionStatus = "connecting" | "open" | "closed";

export const DEFAULT_SLIDERS: SliderValues = {
  T_f: 0,
  DR_alpha: 0.25,
  theta_1: 1 / 6,
};

/** Everything the renderer needs, updated by connection callbacks. */
export class ViewState {
  status: ConnectionStatus = "connecting";
  session = "";
  armLength: number;
  lastState: StateMsg | null = null;
  lastError = "";
  acknowledged: SliderValues = { ...DEFAULT_SLIDERS };
  pendingParams: SliderValues | null = null;
  fatigueTrace = new TraceBuffer(600);
  thetaTrace = new TraceBuffer(600);
  monitor: ConformanceMonitor;
  conformanceWarning = false;

  constructor(armLength: number, gogoK = 1 / 12, theta0 = 1.0) {
    this.armLength = armLength;
    this.monitor = new ConformanceMonitor(theta0, gogoK, armLength);
  }

  applyState(state: StateMsg): void {
    this.lastState = state;
    this.fatigueTrace.push(state.F);
    this.thetaTrace.push(state.theta);
    const ok = this.monitor.check(state, this.acknowledged.theta_1);
    if (!ok) this.conformanceWarning = true;
  }

  /** The ack for a parameter update: pending become the acknowledged ones. */
  confirmParams(): void {
    if (this.pendingParams) {
      this.acknowledged = this.pendingParams;
      this.pendingParams = null;
    }
    this.lastError = "";
  }

  /** Rejected update: keep the acknowledged values and surface the reason. */
  rejectParams(detail: string): void {
    this.pendingParams = null;
    this.lastError = detail;
  }

  reset(): void {
    this.lastState = null;
    this.fatigueTrace = new TraceBuffer(600);
    this.thetaTrace = new TraceBuffer(600);
    this.conformanceWarning = false;
    this.monitor = new ConformanceMonitor(1.0, 1 / 12, this.armLength);
  }
}

/** Canvas pixel position to the unit square the service expects; screen y
 * grows downward, so the top of the canvas is full reach (y = 1). */
export function normalizePointer(
  px: number,
  py: number,
  width: number,
  height: number,
): { x: number; y: number } {
  const clamp01 = (v: number) => Math.min(1, Math.max(0, v));
  return {
    x: clamp01(width > 0 ? px / width : 0),
    y: clamp01(height > 0 ? 1 - py / height : 0),
  };
}
