import { clear, el, linearScale, selectionColor, svgEl } from '../render';
import { ScenarioRow, SummaryDoc } from '../types';

export interface AnalysisCallbacks {
  onBrush(subject: string, low: number, high: number): void;
}

const WIDTH = 220;
const HEIGHT = 86;
const PLOT_TOP = 8;
const PLOT_BOTTOM = 46;

// Scenario Analysis View: three columns of glyphs (attributes,
// indicators, final score + final rank). Each glyph is a frequency line
// chart of the values across all scenarios relative to last year, with
// the selected scenarios' uncertainty bars superimposed below it in
// distinct colors (lowest/highest relative value labelled at the bar
// ends). Dragging horizontally across a glyph brushes a value range and
// appends a server-side filter.
export class AnalysisColumnsView {
  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: AnalysisCallbacks,
  ) {}

  render(
    attributeSummaries: SummaryDoc[],
    indicatorSummaries: SummaryDoc[],
    finalSummary: SummaryDoc,
    selectedRows: ScenarioRow[],
  ): void {
    clear(this.root);
    this.root.appendChild(el('div', { class: 'view-title' }, 'Scenario Analysis'));
    const wrap = el('div', { class: 'analysis-columns' });
    wrap.appendChild(this.column('Attributes', attributeSummaries, selectedRows));
    wrap.appendChild(this.column('Indicators', indicatorSummaries, selectedRows));

    const finalColumn = this.column('Final', [finalSummary], selectedRows);
    finalColumn.appendChild(this.rankGlyph(selectedRows));
    wrap.appendChild(finalColumn);
    this.root.appendChild(wrap);
  }

  private column(title: string, summaries: SummaryDoc[], rows: ScenarioRow[]): HTMLElement {
    const column = el('div', { class: 'analysis-column' });
    column.appendChild(el('div', { class: 'column-title' }, title));
    for (const summary of summaries) column.appendChild(this.glyph(summary, rows));
    return column;
  }

  private glyph(summary: SummaryDoc, rows: ScenarioRow[]): HTMLElement {
    const box = el('div', { class: 'glyph', 'data-subject': summary.subject });
    box.appendChild(el('div', { class: 'glyph-label' }, summary.subject));
    const svg = svgEl('svg', {
      width: String(WIDTH),
      height: String(HEIGHT),
      class: 'glyph-chart',
    });

    const edges = summary.bin_edges;
    // Domain covers both the histogram and every selected band so nothing clips.
    let lo = Math.min(edges[0], summary.uncertainty_band[0]);
    let hi = Math.max(edges[edges.length - 1], summary.uncertainty_band[1]);
    for (const row of rows) {
      const band = this.bandFor(summary.subject, row);
      lo = Math.min(lo, band[0]);
      hi = Math.max(hi, band[1]);
    }
    if (lo === hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    const x = linearScale(lo, hi, 6, WIDTH - 6);
    const peak = Math.max(...summary.frequencies, 1);
    const y = linearScale(0, peak, PLOT_BOTTOM, PLOT_TOP);

    if (lo <= 0 && 0 <= hi) {
      svg.appendChild(
        svgEl('line', {
          x1: String(x(0)),
          y1: String(PLOT_TOP),
          x2: String(x(0)),
          y2: String(PLOT_BOTTOM),
          class: 'zero-line',
        }),
      );
    }

    // Unsmoothed frequency polyline over the bin midpoints.
    const points = summary.frequencies
      .map((freq, i) => {
        const mid = (edges[i] + edges[i + 1]) / 2;
        return `${x(mid)},${y(freq)}`;
      })
      .join(' ');
    svg.appendChild(svgEl('polyline', { points, class: 'freq-line', fill: 'none' }));

    rows.forEach((row, index) => {
      const [bandLo, bandHi] = this.bandFor(summary.subject, row);
      const yPos = PLOT_BOTTOM + 8 + index * 10;
      if (yPos > HEIGHT - 4) return;
      const bar = svgEl('line', {
        x1: String(x(bandLo)),
        y1: String(yPos),
        x2: String(Math.max(x(bandHi), x(bandLo) + 1)),
        y2: String(yPos),
        class: 'uncertainty-bar',
        'data-scenario-id': String(row.scenario_id),
        stroke: selectionColor(index),
        'stroke-width': '4',
      });
      svg.appendChild(bar);
      svg.appendChild(this.bandLabel(x(bandLo) - 2, yPos, bandLo, 'end'));
      svg.appendChild(this.bandLabel(Math.max(x(bandHi), x(bandLo) + 1) + 2, yPos, bandHi, 'start'));
    });

    this.attachBrush(svg, box, summary.subject, x.invert);
    box.appendChild(svg);
    return box;
  }

  private bandLabel(xPos: number, yPos: number, value: number, anchor: string): SVGTextElement {
    const text = svgEl('text', {
      x: String(xPos),
      y: String(yPos + 3),
      class: 'band-label',
      'text-anchor': anchor,
    });
    text.textContent = value.toFixed(1);
    return text;
  }

  private bandFor(subject: string, row: ScenarioRow): [number, number] {
    if (subject === 'final') return row.final.band;
    if (subject.startsWith('ind:')) return row.indicators[subject.slice(4)].band;
    const delta = row.attributes[subject.slice(5)].delta;
    return [delta, delta];
  }

  private attachBrush(
    svg: SVGSVGElement,
    box: HTMLElement,
    subject: string,
    invert: (pixel: number) => number,
  ): void {
    let start: number | null = null;
    const pixelX = (event: MouseEvent) =>
      event.clientX - svg.getBoundingClientRect().left;
    svg.addEventListener('mousedown', (event) => {
      start = pixelX(event as MouseEvent);
      box.classList.add('brushing');
    });
    svg.addEventListener('mouseup', (event) => {
      if (start === null) return;
      const end = pixelX(event as MouseEvent);
      box.classList.remove('brushing');
      const from = Math.min(start, end);
      const to = Math.max(start, end);
      start = null;
      if (to - from < 3) return; // a click, not a brush
      this.callbacks.onBrush(subject, invert(from), invert(to));
    });
  }

  // Final Rank glyph: the predicted rank distributions of the selected
  // scenarios, straight from the served rank histograms.
  private rankGlyph(rows: ScenarioRow[]): HTMLElement {
    const box = el('div', { class: 'glyph rank-glyph', 'data-subject': 'rank' });
    box.appendChild(el('div', { class: 'glyph-label' }, 'final rank'));
    const svg = svgEl('svg', {
      width: String(WIDTH),
      height: String(HEIGHT),
      class: 'glyph-chart',
    });
    const ranks = rows.flatMap((row) => Object.keys(row.rank_distribution).map(Number));
    if (ranks.length) {
      const counts = rows.flatMap((row) => Object.values(row.rank_distribution));
      const x = linearScale(Math.min(...ranks) - 1, Math.max(...ranks) + 1, 6, WIDTH - 6);
      const y = linearScale(0, Math.max(...counts), PLOT_BOTTOM, PLOT_TOP);
      rows.forEach((row, index) => {
        const entries = Object.entries(row.rank_distribution)
          .map(([rank, count]) => [Number(rank), count] as const)
          .sort((a, b) => a[0] - b[0]);
        const points = entries.map(([rank, count]) => `${x(rank)},${y(count)}`).join(' ');
        svg.appendChild(
          svgEl('polyline', {
            points,
            class: 'rank-line',
            'data-scenario-id': String(row.scenario_id),
            stroke: selectionColor(index),
            fill: 'none',
          }),
        );
      });
    }
    box.appendChild(svg);
    return box;
  }
}
