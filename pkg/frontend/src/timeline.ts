import type { TimelineRow } from "./types";

export interface TimelineOptions {
  onSeek(ordinal: number): void;
}

/**
 * Horizontal scrubber: one tick per commit, tooltip with author, date and
 * change counts. Supports a moving "current" cursor and persistent marks
 * for the ordinals that touched the selected entity.
 */
export class Timeline {
  private ticks: HTMLElement[] = [];
  private current = -1;

  constructor(
    container: HTMLElement,
    rows: TimelineRow[],
    options: TimelineOptions,
  ) {
    container.classList.add("timeline");
    container.replaceChildren();
    this.ticks = rows.map((row) => {
      const tick = container.ownerDocument.createElement("button");
      tick.className = "timeline-tick";
      tick.dataset.ordinal = String(row.ordinal);
      tick.title = tooltip(row);
      tick.addEventListener("click", () => options.onSeek(row.ordinal));
      container.appendChild(tick);
      return tick;
    });
  }

  setCurrent(ordinal: number): void {
    if (this.current >= 0 && this.current < this.ticks.length) {
      this.ticks[this.current].classList.remove("timeline-tick--current");
    }
    this.current = ordinal;
    this.ticks[ordinal]?.classList.add("timeline-tick--current");
  }

  /** Highlight the commits where the selected entity changed. */
  setMarks(ordinals: number[]): void {
    const marked = new Set(ordinals);
    this.ticks.forEach((tick, index) => {
      tick.classList.toggle("timeline-tick--touched", marked.has(index));
    });
  }

  clearMarks(): void {
    this.setMarks([]);
  }
}

function tooltip(row: TimelineRow): string {
  const date = new Date(row.timestamp * 1000).toISOString().slice(0, 10);
  const c = row.counts;
  return (
    `#${row.ordinal} ${date} ${row.author}\n` +
    `${row.message}\n` +
    `+${c.added} ~${c.modified} -${c.deleted} >${c.moved}`
  );
}
