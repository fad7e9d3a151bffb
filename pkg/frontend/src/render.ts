import type { ConsoleState, SupportDiff } from './state';
import { deltaVsRank1, sortedCards, supportDiff } from './state';
import type { ModelRecord } from './types';

const el = <K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] => {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
};

const fmt = (value: number | null | undefined, digits = 4): string =>
  value == null ? '–' : value.toFixed(digits);

const deltaBadge = (delta: number | null): HTMLElement => {
  const badge = el('span', 'delta', delta == null ? '' : `${delta >= 0 ? '+' : ''}${delta.toFixed(4)} vs #1`);
  if (delta != null) badge.classList.add(delta < 0 ? 'delta-better' : 'delta-worse');
  return badge;
};

/** Inline SVG sparkline of objective ratio per rank; no chart dependency. */
export const sparkline = (ratios: number[], width = 220, height = 40): SVGSVGElement => {
  const svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
  svg.setAttribute('width', String(width));
  svg.setAttribute('height', String(height));
  svg.setAttribute('class', 'sparkline');
  if (ratios.length === 0) return svg;
  const lo = Math.min(...ratios, 0.0);
  const hi = Math.max(...ratios, 1.0);
  const span = hi - lo || 1.0;
  const step = ratios.length > 1 ? width / (ratios.length - 1) : 0;
  const points = ratios
    .map((r, i) => `${(i * step).toFixed(1)},${(height - 3 - ((r - lo) / span) * (height - 6)).toFixed(1)}`)
    .join(' ');
  const line = document.createElementNS('http://www.w3.org/2000/svg', 'polyline');
  line.setAttribute('points', points);
  line.setAttribute('fill', 'none');
  line.setAttribute('stroke', 'currentColor');
  line.setAttribute('stroke-width', '1.5');
  svg.appendChild(line);
  return svg;
};

export const renderCard = (state: ConsoleState, model: ModelRecord): HTMLElement => {
  const card = el('article', 'card');
  card.dataset.rank = String(model.rank);

  const head = el('header', 'card-head');
  head.appendChild(el('span', 'rank', `#${model.rank}`));
  head.appendChild(el('span', 'objective', `f = ${fmt(model.objective, 6)}`));
  head.appendChild(el('span', 'ratio', `ratio ${fmt(model.objective_ratio, 4)}`));
  card.appendChild(head);

  const body = el('div', 'card-body');
  body.appendChild(el('div', 'supp-size', `|supp| = ${model.support_size}`));
  const suppList = el('div', 'support-list', model.support.join(', ') || '(empty)');
  body.appendChild(suppList);

  const m = model.metrics;
  const metrics = el('dl', 'metrics');
  const row = (label: string, value: string, delta?: HTMLElement) => {
    const dt = el('dt', undefined, label);
    const dd = el('dd', undefined, value);
    if (delta) dd.appendChild(delta);
    metrics.appendChild(dt);
    metrics.appendChild(dd);
  };
  row('test hinge', fmt(m?.test_hinge), deltaBadge(deltaVsRank1(state, model, 'test_hinge')));
  row('misclass', fmt(m?.misclass), deltaBadge(deltaVsRank1(state, model, 'misclass')));
  row('DP', fmt(m?.dp), deltaBadge(deltaVsRank1(state, model, 'dp')));
  body.appendChild(metrics);
  card.appendChild(body);

  const foot = el('footer', 'card-foot');
  const compareBox = el('label', 'compare-toggle');
  const compareInput = el('input') as HTMLInputElement;
  compareInput.type = 'checkbox';
  compareInput.className = 'compare-box';
  compareInput.checked = state.compare.includes(model.rank);
  compareBox.appendChild(compareInput);
  compareBox.appendChild(document.createTextNode(' compare'));
  foot.appendChild(compareBox);

  const selectBox = el('label', 'select-toggle');
  const selectInput = el('input') as HTMLInputElement;
  selectInput.type = 'checkbox';
  selectInput.className = 'select-box';
  selectInput.checked = state.selection.includes(model.rank);
  selectBox.appendChild(selectInput);
  selectBox.appendChild(document.createTextNode(' select'));
  foot.appendChild(selectBox);
  card.appendChild(foot);

  return card;
};

export const renderCards = (state: ConsoleState, container: HTMLElement): void => {
  container.replaceChildren(...sortedCards(state).map((m) => renderCard(state, m)));
};

export const renderComparePanel = (state: ConsoleState, panel: HTMLElement): void => {
  panel.replaceChildren();
  if (state.compare.length !== 2) {
    panel.appendChild(el('p', 'hint', 'pick two cards to compare their supports'));
    return;
  }
  const [ra, rb] = state.compare;
  const a = state.cards.find((c) => c.rank === ra);
  const b = state.cards.find((c) => c.rank === rb);
  if (!a || !b) return;
  const diff: SupportDiff = supportDiff(a, b);
  const block = (title: string, values: number[], cls: string) => {
    const div = el('div', `diff ${cls}`);
    div.appendChild(el('h4', undefined, title));
    div.appendChild(el('p', undefined, values.join(', ') || '(none)'));
    return div;
  };
  panel.appendChild(el('h3', undefined, `support differences #${a.rank} vs #${b.rank}`));
  panel.appendChild(block(`only #${a.rank}`, diff.onlyA, 'only-a'));
  panel.appendChild(block(`only #${b.rank}`, diff.onlyB, 'only-b'));
  panel.appendChild(block('shared', diff.shared, 'shared'));
};

export const renderSparkline = (state: ConsoleState, slot: HTMLElement): void => {
  const ratios = state.cards.map((c) => c.objective_ratio);
  slot.replaceChildren(sparkline(ratios));
};

export const renderTerminalBanner = (container: HTMLElement): void => {
  const banner = el('div', 'banner terminal', 'session exhausted: every distinct model has been emitted');
  container.appendChild(banner);
};

export const renderErrorBanner = (container: HTMLElement, message: string): HTMLElement => {
  const banner = el('div', 'banner error', message);
  container.appendChild(banner);
  return banner;
};
