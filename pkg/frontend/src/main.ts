/** Browser bootstrap: create a session, open the socket, mount the app. */
import { App } from "./app.js";
import type { StoryExport } from "./protocol.js";
import type { SocketLike } from "./connection.js";

function wsUrl(sessionId: string): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/session/${sessionId}/ws`;
}

async function boot(): Promise<void> {
  const mount = document.getElementById("app");
  if (!mount) throw new Error("missing #app mount point");
  const created = await fetch("/session", { method: "POST" }).then((r) => r.json());
  const sessionId: string = created.id;

  const app = new App({
    doc: document,
    mount,
    socketFactory: () => {
      const ws = new WebSocket(wsUrl(sessionId));
      const like: SocketLike = {
        send: (data) => ws.send(data),
        close: () => ws.close(),
        onopen: null,
        onclose: null,
        onmessage: null,
      };
      ws.onopen = () => like.onopen?.();
      ws.onclose = () => like.onclose?.();
      ws.onmessage = (e) => like.onmessage?.(String(e.data));
      return like;
    },
    fetchExport: () =>
      fetch(`/session/${sessionId}/export`).then((r) => r.json() as Promise<StoryExport>),
  });
  app.start();
}

boot().catch((err) => {
  const mount = document.getElementById("app");
  if (mount) mount.textContent = `failed to start: ${err}`;
});
