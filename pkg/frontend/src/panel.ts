import type { EntityHistory } from "./types";

const METRIC_LABELS: Record<string, string> = {
  num_classes: "classes",
  num_instance_variables: "instance variables",
  num_for_loops: "for loops",
  num_methods: "methods",
  lines_of_code: "lines of code",
  num_entities: "entities",
  num_entity_types: "entity types",
  max_properties_per_entity: "max properties",
  max_nesting_level: "max nesting",
  size_bytes: "size (bytes)",
};

/** Info panel for the selected entity: path, kind, and its metric vector. */
export class InfoPanel {
  constructor(private readonly container: HTMLElement) {
    container.classList.add("info-panel");
    this.clear();
  }

  clear(): void {
    this.container.replaceChildren();
    this.container.classList.add("info-panel--empty");
  }

  show(history: EntityHistory, ordinal: number): void {
    const doc = this.container.ownerDocument;
    this.container.classList.remove("info-panel--empty");
    this.container.replaceChildren();

    const version = versionAt(history, ordinal);
    const title = doc.createElement("h3");
    title.textContent = version?.path ?? history.first_path;
    this.container.appendChild(title);

    const kind = doc.createElement("p");
    kind.className = "info-panel-kind";
    kind.textContent = version ? `${version.kind} (${version.change})` : history.kind;
    this.container.appendChild(kind);

    if (version) {
      const table = doc.createElement("table");
      table.className = "info-panel-metrics";
      for (const [key, value] of Object.entries(version.metrics)) {
        const row = doc.createElement("tr");
        const name = doc.createElement("td");
        name.textContent = METRIC_LABELS[key] ?? key;
        const figure = doc.createElement("td");
        figure.textContent = String(value);
        figure.dataset.metric = key;
        row.append(name, figure);
        table.appendChild(row);
      }
      this.container.appendChild(table);
    }

    if (history.moves.length > 0) {
      const moves = doc.createElement("p");
      moves.className = "info-panel-moves";
      moves.textContent = history.moves
        .map((m) => `#${m.ordinal}: ${m.from} → ${m.to}`)
        .join("\n");
      this.container.appendChild(moves);
    }
  }
}

/** Latest version at or before the ordinal, mirroring the analyzer's rule. */
export function versionAt(history: EntityHistory, ordinal: number) {
  let found = null;
  for (const version of history.versions) {
    if (version.ordinal > ordinal) {
      break;
    }
    found = version;
  }
  return found && found.change !== "Deleted" ? found : null;
}
