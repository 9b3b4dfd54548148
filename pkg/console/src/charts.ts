import { esc } from "./dom.js";

export interface BarDatum {
  label: string;
  value: number;
}

/**
 * Horizontal bar chart as plain divs. Every bar carries data-label and
 * data-value with the exact numbers it was built from, so the rendering
 * can be checked against the source data without scraping pixel widths.
 */
export function barChart(data: BarDatum[], className = "chart"): HTMLElement {
  const chart = document.createElement("div");
  chart.className = className;
  const max = Math.max(1, ...data.map((d) => d.value));
  for (const d of data) {
    const row = document.createElement("div");
    row.className = "chart-row";
    const pct = (d.value / max) * 100;
    row.innerHTML = `
      <span class="chart-label">${esc(d.label)}</span>
      <span class="chart-track"><span class="chart-bar" style="width: ${pct.toFixed(1)}%"></span></span>
      <span class="chart-value">${d.value}</span>
    `;
    const bar = row.querySelector<HTMLElement>(".chart-bar")!;
    bar.dataset.label = d.label;
    bar.dataset.value = String(d.value);
    chart.appendChild(row);
  }
  return chart;
}
