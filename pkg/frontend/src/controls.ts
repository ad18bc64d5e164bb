/** Button row and the story-settings dialog. */
import type { ClientEvent, Settings } from "./protocol.js";
import type { ViewState } from "./state.js";

export class Controls {
  readonly root: HTMLElement;
  private autoToggle: HTMLInputElement;
  private promptField: HTMLInputElement;
  private previewChip: HTMLElement;
  private statusDot: HTMLElement;

  constructor(doc: Document, private send: (event: ClientEvent) => void) {
    this.root = doc.createElement("div");
    this.root.className = "controls";

    const btn = (label: string, title: string, onClick: () => void) => {
      const b = doc.createElement("button");
      b.textContent = label;
      b.title = title;
      b.addEventListener("click", onClick);
      this.root.appendChild(b);
      return b;
    };

    this.promptField = doc.createElement("input");
    this.promptField.type = "text";
    this.promptField.placeholder = "high-level direction (optional)";
    this.promptField.className = "prompt-field";

    btn("▶ play", "play back the recorded story", () => this.send({ type: "play" }));
    btn("✦ motion+text", "let the machine move both symbols and write the sentence", () =>
      this.send({ type: "generate_motion_both" }),
    );
    btn("✎ text", "generate the next sentence", () =>
      this.send({ type: "generate_text", user_prompt: this.prompt() }),
    );
    btn("⇄ swap + text", "generate with the active character swapped", () =>
      this.send({ type: "generate_text", user_prompt: this.prompt(), swap_active: true }),
    );
    this.root.appendChild(this.promptField);
    btn("✂ delete after", "delete frames and textboxes after the cursor", () => {
      const state = this.lastState;
      if (state) this.send({ type: "delete_after", frame: state.cursor });
    });

    const autoLabel = doc.createElement("label");
    autoLabel.className = "auto-toggle";
    this.autoToggle = doc.createElement("input");
    this.autoToggle.type = "checkbox";
    this.autoToggle.checked = true;
    this.autoToggle.addEventListener("change", () =>
      this.send({ type: "set_auto", on: this.autoToggle.checked }),
    );
    autoLabel.appendChild(this.autoToggle);
    autoLabel.appendChild(doc.createTextNode(" auto"));
    this.root.appendChild(autoLabel);

    this.previewChip = doc.createElement("span");
    this.previewChip.className = "preview-chip";
    this.root.appendChild(this.previewChip);

    this.statusDot = doc.createElement("span");
    this.statusDot.className = "status-dot offline";
    this.statusDot.title = "connection";
    this.root.appendChild(this.statusDot);
  }

  private lastState: ViewState | null = null;

  private prompt(): string | undefined {
    const value = this.promptField.value.trim();
    return value ? value : undefined;
  }

  render(state: ViewState): void {
    this.lastState = state;
    this.autoToggle.checked = state.auto;
    if (state.preview) {
      const top = state.preview.terms
        .slice(0, 4)
        .map(([t, w]) => `${t} ${(w * 100).toFixed(0)}%`)
        .join(" · ");
      const name = state.preview.active === 0 ? state.settings.name0 : state.settings.name1;
      this.previewChip.textContent = `${name}: ${top}`;
    } else {
      this.previewChip.textContent = "";
    }
    this.statusDot.className = "status-dot " + (state.connected ? "online" : "offline");
  }
}

export class SettingsDialog {
  readonly root: HTMLElement;
  private fields: Record<string, HTMLInputElement | HTMLTextAreaElement> = {};

  constructor(doc: Document, private send: (event: ClientEvent) => void) {
    this.root = doc.createElement("div");
    this.root.className = "settings-dialog hidden";
    const title = doc.createElement("h3");
    title.textContent = "Story setting";
    this.root.appendChild(title);

    const field = (key: string, label: string, textarea = false) => {
      const wrap = doc.createElement("label");
      wrap.textContent = label;
      const input = textarea ? doc.createElement("textarea") : doc.createElement("input");
      input.className = "settings-field";
      wrap.appendChild(input);
      this.root.appendChild(wrap);
      this.fields[key] = input;
    };
    field("name0", "First character");
    field("description0", "Their description", true);
    field("name1", "Second character");
    field("description1", "Their description", true);
    field("scene", "Scene", true);

    for (const char of [0, 1]) {
      const upload = doc.createElement("input");
      upload.type = "file";
      upload.accept = "image/*";
      upload.title = `portrait for character ${char}`;
      upload.addEventListener("change", () => {
        const file = upload.files?.[0];
        if (!file) return;
        const reader = new FileReader();
        reader.onload = () => {
          this.portraits[char] = String(reader.result);
        };
        reader.readAsDataURL(file);
      });
      this.root.appendChild(upload);
    }

    const save = doc.createElement("button");
    save.textContent = "save";
    save.addEventListener("click", () => {
      this.send({ type: "set_settings", settings: this.collect() });
      this.hide();
    });
    this.root.appendChild(save);
  }

  private portraits: (string | null)[] = [null, null];

  private collect(): Settings {
    return {
      name0: this.fields.name0.value || "Character A",
      name1: this.fields.name1.value || "Character B",
      description0: this.fields.description0.value,
      description1: this.fields.description1.value,
      scene: this.fields.scene.value,
      portrait0: this.portraits[0],
      portrait1: this.portraits[1],
    };
  }

  show(settings: Settings): void {
    this.fields.name0.value = settings.name0 ?? "";
    this.fields.name1.value = settings.name1 ?? "";
    this.fields.description0.value = settings.description0 ?? "";
    this.fields.description1.value = settings.description1 ?? "";
    this.fields.scene.value = settings.scene ?? "";
    this.portraits = [settings.portrait0 ?? null, settings.portrait1 ?? null];
    this.root.classList.remove("hidden");
  }

  hide(): void {
    this.root.classList.add("hidden");
  }
}
