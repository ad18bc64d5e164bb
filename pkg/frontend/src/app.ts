/** Composition root: builds the page, owns the state, routes events. */
import { Connection, type SocketFactory } from "./connection.js";
import type { ClientEvent, StoryExport } from "./protocol.js";
import { CanvasPainter, type Painter, Playground } from "./playground.js";
import { applyServerEvent, initialState, stateFromExport, type ViewState } from "./state.js";
import { Controls, SettingsDialog } from "./controls.js";
import { Timeline } from "./timeline.js";

export interface AppDeps {
  doc: Document;
  mount: HTMLElement;
  socketFactory: SocketFactory;
  fetchExport: () => Promise<StoryExport>;
  painter?: Painter; // injectable for tests
}

export class App {
  state: ViewState = initialState();
  readonly connection: Connection;
  readonly playground: Playground;
  readonly timeline: Timeline;
  readonly controls: Controls;
  readonly settingsDialog: SettingsDialog;
  readonly canvas: HTMLCanvasElement;

  constructor(private deps: AppDeps) {
    const doc = deps.doc;
    this.canvas = doc.createElement("canvas");
    this.canvas.width = 720;
    this.canvas.height = 480;
    this.canvas.className = "playground";

    this.connection = new Connection(deps.socketFactory, {
      onEvent: (event) => {
        applyServerEvent(this.state, event);
        this.renderAll();
      },
      onStatus: (connected) => {
        this.state.connected = connected;
        this.renderAll();
      },
      onResync: () => this.resync(),
    });

    const send = (event: ClientEvent) => this.connection.send(event);
    this.playground = new Playground(this.canvas, deps.painter ?? new CanvasPainter(this.canvas), send);
    this.timeline = new Timeline(doc, send);
    this.controls = new Controls(doc, send);
    this.settingsDialog = new SettingsDialog(doc, send);

    const settingsButton = doc.createElement("button");
    settingsButton.textContent = "⚙ setting";
    settingsButton.className = "settings-button";
    settingsButton.addEventListener("click", () => this.settingsDialog.show(this.state.settings));

    deps.mount.appendChild(this.timeline.root);
    deps.mount.appendChild(this.canvas);
    deps.mount.appendChild(this.controls.root);
    deps.mount.appendChild(settingsButton);
    deps.mount.appendChild(this.settingsDialog.root);
  }

  start(): void {
    this.connection.connect();
    this.renderAll();
  }

  /** Rebuild local state from the authoritative export after a reconnect. */
  async resync(): Promise<void> {
    try {
      const doc = await this.deps.fetchExport();
      const fresh = stateFromExport(doc);
      fresh.connected = true;
      fresh.auto = this.state.auto;
      this.state = fresh;
      this.renderAll();
    } catch {
      this.state.notices.push("warning: resync failed");
    }
  }

  renderAll(): void {
    this.playground.render(this.state);
    this.timeline.render(this.state);
    this.controls.render(this.state);
  }
}
