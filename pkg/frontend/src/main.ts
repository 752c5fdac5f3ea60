// Entry point: wire the socket, the state, and the canvas together.
// Server URL comes from the "?ws=" query parameter.

import { NavClient } from "./client.js";
import { pixelToCell, render } from "./render.js";
import { applyFrame, initialState, setStatus, tapCell, ViewState } from "./state.js";

function serverUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("ws") ?? `ws://${window.location.hostname}:8080`;
}

function main(): void {
  const canvas = document.getElementById("map") as HTMLCanvasElement;
  const banner = document.getElementById("banner") as HTMLDivElement;
  const notice = document.getElementById("notice") as HTMLDivElement;

  let view: ViewState = initialState();

  const redraw = () => {
    canvas.width = window.innerWidth;
    canvas.height = window.innerHeight - 48;
    render(view, canvas);
    banner.textContent = view.status === "open"
      ? `connected to ${serverUrl()}`
      : `${view.status}... (${serverUrl()})`;
    banner.className = view.status === "open" ? "ok" : "down";
    notice.textContent = view.notice ?? "";
  };

  const client = new NavClient(
    serverUrl(),
    (raw) => {
      view = applyFrame(view, raw);
      redraw();
    },
    (status) => {
      view = setStatus(view, status);
      redraw();
    },
  );

  canvas.addEventListener("click", (event) => {
    const rect = canvas.getBoundingClientRect();
    const cell = pixelToCell(view, canvas, event.clientX - rect.left,
                             event.clientY - rect.top);
    if (!cell) return;
    const result = tapCell(view, cell);
    view = result.view;
    if (result.frame !== null) client.send(result.frame);
    redraw();
  });

  window.addEventListener("resize", redraw);
  client.connect();
  redraw();
}

main();
