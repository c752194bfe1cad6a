/** DOM rendering for the three result views. Pure render functions that take
 * API payloads and write into a container; navigation is delegated through
 * callbacks so the router stays out of the way of tests. */

import { FilePayload, LabelEntry, PackagePayload, ProjectPayload } from './api';
import { labelColor, UNANNOTATED_COLOR } from './colors';
import { computeTreemap, TreemapItem, TreemapRect } from './treemap';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function tooltipText(labels: LabelEntry[]): string {
  if (labels.length === 0) return 'unannotated';
  return labels
    .slice(0, 3)
    .map((l) => `${l.name} ${(l.probability * 100).toFixed(1)}%`)
    .join('\n');
}

/** Horizontal bar chart of the project's ranked labels, top first. */
export function renderBarChart(container: HTMLElement, project: ProjectPayload): void {
  container.textContent = '';
  const heading = el('h2', 'project-heading', `${project.name} @ ${project.sha.slice(0, 10)}`);
  container.appendChild(heading);
  container.appendChild(
    el('p', 'project-meta', `${project.n_annotated} of ${project.n_files} files annotated`)
  );

  if (project.status !== 'annotated' || project.top_labels.length === 0) {
    container.appendChild(el('p', 'empty-state', 'No annotation for this project.'));
    return;
  }

  const chart = el('div', 'bar-chart');
  const maxProb = project.top_labels[0].probability;
  for (const label of project.top_labels) {
    const row = el('div', 'bar-row');
    row.dataset.labelId = String(label.id);
    row.appendChild(el('span', 'bar-label', label.name));
    const track = el('div', 'bar-track');
    const bar = el('div', 'bar-fill');
    bar.style.width = `${(label.probability / maxProb) * 100}%`;
    bar.style.backgroundColor = labelColor(label.id);
    track.appendChild(bar);
    row.appendChild(track);
    row.appendChild(el('span', 'bar-value', label.probability.toFixed(4)));
    chart.appendChild(row);
  }
  container.appendChild(chart);
}

function renderRects(
  container: HTMLElement,
  rects: TreemapRect[],
  onClick?: (id: string) => void
): void {
  const map = el('div', 'treemap');
  map.style.position = 'relative';
  for (const rect of rects) {
    const cell = el('div', 'treemap-cell');
    cell.dataset.id = rect.id;
    cell.title = rect.tooltip;
    cell.style.position = 'absolute';
    cell.style.left = `${rect.x}px`;
    cell.style.top = `${rect.y}px`;
    cell.style.width = `${rect.w}px`;
    cell.style.height = `${rect.h}px`;
    cell.style.backgroundColor =
      rect.colorKey === null ? UNANNOTATED_COLOR : labelColor(rect.colorKey);
    cell.appendChild(el('span', 'treemap-caption', rect.id));
    if (onClick) {
      cell.classList.add('clickable');
      cell.addEventListener('click', () => onClick(rect.id));
    }
    map.appendChild(cell);
  }
  container.appendChild(map);
}

/** Treemap of packages: area = file count, color = top label. Clicking a
 * package drills down into its files. */
export function renderPackageTreemap(
  container: HTMLElement,
  packages: PackagePayload[],
  width: number,
  height: number,
  onSelect: (pkg: string) => void
): void {
  container.textContent = '';
  if (packages.length === 0) {
    container.appendChild(el('p', 'empty-state', 'No packages in this version.'));
    return;
  }
  const items: TreemapItem[] = packages.map((p) => ({
    id: p.package,
    size: p.n_files,
    colorKey: p.top_labels.length > 0 ? p.top_labels[0].id : null,
    tooltip: `${p.package} (${p.n_files} files)\n${tooltipText(p.top_labels)}`,
  }));
  renderRects(container, computeTreemap(items, width, height), onSelect);
}

/** Treemap of one package's files: every file has size 1. */
export function renderFileTreemap(
  container: HTMLElement,
  files: FilePayload[],
  width: number,
  height: number
): void {
  container.textContent = '';
  if (files.length === 0) {
    container.appendChild(el('p', 'empty-state', 'No files in this package.'));
    return;
  }
  const items: TreemapItem[] = files.map((f) => ({
    id: f.path,
    size: 1,
    colorKey: f.status === 'annotated' && f.top_labels.length > 0 ? f.top_labels[0].id : null,
    tooltip: `${f.path}${f.fallback ? ' (fallback scan)' : ''}\n${tooltipText(f.top_labels)}`,
  }));
  renderRects(container, computeTreemap(items, width, height));
}
