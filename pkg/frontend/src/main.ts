import { DemoConnection, HELLO_DEFAULTS, defaultServiceUrl } from "./connection.js";
import {
  Debouncer,
  RateLimiter,
  SliderValues,
  ViewState,
  normalizePointer,
} from "./model.js";
import { renderFrame } from "./render.js";

const canvas = document.getElementById("stage") as HTMLCanvasElement;
const sliderTf = document.getElementById("slider-tf") as HTMLInputElement;
const sliderDr = document.getElementById("slider-dr") as HTMLInputElement;
const sliderTheta1 = document.getElementById("slider-theta1") as HTMLInputElement;
const readoutTf = document.getElementById("readout-tf") as HTMLSpanElement;
const readoutDr = document.getElementById("readout-dr") as HTMLSpanElement;
const readoutTheta1 = document.getElementById("readout-theta1") as HTMLSpanElement;

const view = new ViewState(HELLO_DEFAULTS.L);
const frameLimiter = new RateLimiter(60);
const paramsDebouncer = new Debouncer<SliderValues>(100);
let connection: DemoConnection | null = null;

function connect(): void {
  view.status = "connecting";
  view.reset();
  connection = new DemoConnection(defaultServiceUrl(), HELLO_DEFAULTS, {
    onHello(session) {
      view.status = "open";
      view.session = session;
    },
    onFrameState(msg) {
      if (msg.type === "state") view.applyState(msg);
      else if (msg.type === "error") view.lastError = `${msg.code}: ${msg.detail}`;
    },
    onParamsReply(msg) {
      if (msg.type === "state") {
        view.confirmParams();
        view.applyState(msg);
        syncSliders(view.acknowledged);
      } else if (msg.type === "error") {
        view.rejectParams(`${msg.code}: ${msg.detail}`);
        syncSliders(view.acknowledged);
      }
    },
    onProtocolError(detail) {
      view.lastError = detail;
    },
    onClose() {
      view.status = "closed";
    },
  });
}

function syncSliders(values: SliderValues): void {
  sliderTf.value = String(values.T_f);
  sliderDr.value = String(values.DR_alpha);
  sliderTheta1.value = String(values.theta_1);
  updateReadouts();
}

function updateReadouts(): void {
  readoutTf.textContent = Number(sliderTf.value).toFixed(0);
  readoutDr.textContent = Number(sliderDr.value).toFixed(2);
  readoutTheta1.textContent = Number(sliderTheta1.value).toFixed(2);
}

function sliderValues(): SliderValues {
  return {
    T_f: Number(sliderTf.value),
    DR_alpha: Number(sliderDr.value),
    theta_1: Number(sliderTheta1.value),
  };
}

for (const slider of [sliderTf, sliderDr, sliderTheta1]) {
  slider.addEventListener("input", () => {
    updateReadouts();
    paramsDebouncer.schedule(sliderValues(), performance.now());
  });
}

canvas.addEventListener("pointermove", (event) => {
  if (!connection?.open || view.status !== "open") return;
  if (!frameLimiter.allow(performance.now())) return;
  const rect = canvas.getBoundingClientRect();
  const p = normalizePointer(
    event.clientX - rect.left,
    event.clientY - rect.top,
    rect.width,
    rect.height,
  );
  connection.sendFrame({
    t: performance.now() / 1000,
    pointer_x: p.x,
    pointer_y: p.y,
  });
});

canvas.addEventListener("click", () => {
  if (view.status === "closed") {
    connection?.close();
    connect();
  }
});

function loop(): void {
  const pending = paramsDebouncer.flush(performance.now());
  if (pending && connection?.open && view.status === "open") {
    view.pendingParams = pending;
    connection.sendParams(pending);
  }
  renderFrame(view, canvas);
  requestAnimationFrame(loop);
}

syncSliders(view.acknowledged);
connect();
requestAnimationFrame(loop);
