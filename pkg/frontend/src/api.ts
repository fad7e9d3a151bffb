import type { DatasetInfo, ModelRecord, SessionInfo } from './types';

export class ServiceError extends Error {
  code: string;
  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

const parseError = async (res: Response): Promise<never> => {
  let code = `http_${res.status}`;
  let message = res.statusText;
  try {
    const body = await res.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ServiceError(code, message);
};

const getJson = async <T>(url: string): Promise<T> => {
  const res = await fetch(url);
  if (!res.ok) return parseError(res);
  return res.json() as Promise<T>;
};

const postJson = async <T>(url: string, body: unknown): Promise<T> => {
  const res = await fetch(url, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(body),
  });
  if (!res.ok) return parseError(res);
  return res.json() as Promise<T>;
};

export type UploadRequest = {
  format: 'csv' | 'libsvm' | 'json';
  content: string;
  name?: string;
  label_column?: string;
  positive_label?: string;
};

export type SessionRequest = {
  dataset_id: string;
  c: number;
  kernel: Record<string, unknown>;
  test_dataset_id?: string;
  sensitive?: string;
  exclude_sensitive?: boolean;
};

export const listDatasets = () =>
  getJson<{ datasets: DatasetInfo[] }>('/api/datasets').then((r) => r.datasets);

export const uploadDataset = (req: UploadRequest) => postJson<DatasetInfo>('/api/datasets', req);

export const createSession = (req: SessionRequest) =>
  postJson<{ session_id: string }>('/api/sessions', req).then((r) => r.session_id);

export const sessionInfo = (sessionId: string) =>
  getJson<SessionInfo>(`/api/sessions/${sessionId}`);

/** One pull of the model stream; null means the session is exhausted (204). */
export const nextModel = async (sessionId: string): Promise<ModelRecord | null> => {
  const res = await fetch(`/api/sessions/${sessionId}/next`);
  if (res.status === 204) return null;
  if (!res.ok) return parseError(res);
  return res.json() as Promise<ModelRecord>;
};

export const listModels = (sessionId: string) =>
  getJson<{ models: ModelRecord[] }>(`/api/sessions/${sessionId}/models`).then((r) => r.models);

export const saveSelection = (sessionId: string, ranks: number[]) =>
  postJson<{ ranks: number[] }>(`/api/sessions/${sessionId}/selection`, { ranks }).then(
    (r) => r.ranks,
  );

export const getSelection = (sessionId: string) =>
  getJson<{ ranks: number[] }>(`/api/sessions/${sessionId}/selection`).then((r) => r.ranks);
