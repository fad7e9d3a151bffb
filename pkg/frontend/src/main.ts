import * as api from './api';
import { initialState, toggleCompare, toggleSelection } from './state';
import {
  renderCards,
  renderComparePanel,
  renderErrorBanner,
  renderSparkline,
  renderTerminalBanner,
} from './render';
import './style.css';

const state = initialState();

const $ = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
};

const refresh = () => {
  renderCards(state, $('cards'));
  renderComparePanel(state, $('compare-panel'));
  renderSparkline(state, $('sparkline-slot'));
  const next = $<HTMLButtonElement>('next-btn');
  next.disabled = state.fetching || state.exhausted || !state.sessionId;
  $<HTMLButtonElement>('save-selection-btn').disabled = !state.sessionId;
  wireCardControls();
};

const wireCardControls = () => {
  for (const card of Array.from($('cards').children)) {
    const rank = Number((card as HTMLElement).dataset.rank);
    card.querySelector<HTMLInputElement>('.compare-box')?.addEventListener('change', () => {
      toggleCompare(state, rank);
      refresh();
    });
    card.querySelector<HTMLInputElement>('.select-box')?.addEventListener('change', () => {
      toggleSelection(state, rank);
      refresh();
    });
  }
};

const showError = (err: unknown) => {
  const message = err instanceof Error ? err.message : String(err);
  const banner = renderErrorBanner($('banners'), message);
  setTimeout(() => banner.remove(), 8000);
};

const refreshDatasets = async () => {
  const datasets = await api.listDatasets();
  for (const selectId of ['train-dataset', 'test-dataset']) {
    const select = $<HTMLSelectElement>(selectId);
    const keep = select.value;
    select.replaceChildren();
    if (selectId === 'test-dataset') {
      const none = document.createElement('option');
      none.value = '';
      none.textContent = '(none)';
      select.appendChild(none);
    }
    for (const d of datasets) {
      const opt = document.createElement('option');
      opt.value = d.dataset_id;
      opt.textContent = `${d.dataset_id} ${d.name ?? ''} (n=${d.n}, d=${d.d})`;
      select.appendChild(opt);
    }
    if (keep) select.value = keep;
  }
};

const uploadHandler = async () => {
  try {
    const format = $<HTMLSelectElement>('upload-format').value as 'csv' | 'libsvm' | 'json';
    const body: api.UploadRequest = {
      format,
      content: $<HTMLTextAreaElement>('upload-content').value,
      name: $<HTMLInputElement>('upload-name').value || undefined,
    };
    if (format === 'csv') {
      body.label_column = $<HTMLInputElement>('upload-label').value;
      body.positive_label = $<HTMLInputElement>('upload-positive').value;
    }
    const info = await api.uploadDataset(body);
    await refreshDatasets();
    $<HTMLSelectElement>('train-dataset').value = info.dataset_id;
  } catch (err) {
    showError(err);
  }
};

const kernelFromForm = (): Record<string, unknown> => {
  const kind = $<HTMLSelectElement>('kernel-kind').value;
  if (kind === 'rbf') return { kind, gamma: Number($<HTMLInputElement>('kernel-gamma').value) };
  if (kind === 'polynomial')
    return {
      kind,
      degree: Number($<HTMLInputElement>('kernel-degree').value),
      coef0: Number($<HTMLInputElement>('kernel-coef0').value),
    };
  return { kind: 'linear' };
};

const startSession = async () => {
  try {
    const req: api.SessionRequest = {
      dataset_id: $<HTMLSelectElement>('train-dataset').value,
      c: Number($<HTMLInputElement>('c-value').value),
      kernel: kernelFromForm(),
    };
    const test = $<HTMLSelectElement>('test-dataset').value;
    if (test) req.test_dataset_id = test;
    const sensitive = $<HTMLInputElement>('sensitive-column').value.trim();
    if (sensitive) {
      req.sensitive = sensitive;
      req.exclude_sensitive = $<HTMLInputElement>('exclude-sensitive').checked;
    }
    state.sessionId = await api.createSession(req);
    state.cards = [];
    state.exhausted = false;
    state.compare = [];
    state.selection = [];
    $('banners').replaceChildren();
    $('session-label').textContent = `session ${state.sessionId}`;
    refresh();
  } catch (err) {
    showError(err);
  }
};

/** Next requests are serialized client-side: the button stays disabled in flight. */
const fetchNext = async () => {
  if (!state.sessionId || state.fetching || state.exhausted) return;
  state.fetching = true;
  refresh();
  try {
    const model = await api.nextModel(state.sessionId);
    if (model === null) {
      state.exhausted = true;
      renderTerminalBanner($('banners'));
    } else {
      state.cards = [...state.cards, model];
    }
  } catch (err) {
    showError(err);
  } finally {
    state.fetching = false;
    refresh();
  }
};

const saveSelection = async () => {
  if (!state.sessionId) return;
  try {
    const ranks = await api.saveSelection(state.sessionId, state.selection);
    $('selection-label').textContent = `saved ranks: ${ranks.join(', ') || '(none)'}`;
  } catch (err) {
    showError(err);
  }
};

const boot = () => {
  $('upload-btn').addEventListener('click', uploadHandler);
  $('start-btn').addEventListener('click', startSession);
  $('next-btn').addEventListener('click', fetchNext);
  $('save-selection-btn').addEventListener('click', saveSelection);
  $<HTMLSelectElement>('sort-key').addEventListener('change', (ev) => {
    state.sortKey = (ev.target as HTMLSelectElement).value as typeof state.sortKey;
    refresh();
  });
  $<HTMLSelectElement>('sort-dir').addEventListener('change', (ev) => {
    state.sortAscending = (ev.target as HTMLSelectElement).value === 'asc';
    refresh();
  });
  $<HTMLSelectElement>('kernel-kind').addEventListener('change', (ev) => {
    const kind = (ev.target as HTMLSelectElement).value;
    $('kernel-rbf-params').hidden = kind !== 'rbf';
    $('kernel-poly-params').hidden = kind !== 'polynomial';
  });
  refreshDatasets().catch(showError);
  refresh();
};

document.addEventListener('DOMContentLoaded', boot);
