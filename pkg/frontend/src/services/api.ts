import type {
  ApiErrorBody,
  EmployeeDetail,
  EmployeeList,
  ModelInfo,
  Overview,
  RiskFilter,
  ScreenResult,
  SortKey,
  WhatifResult,
} from '../types';
import type { AppConfig } from '../config';

/** Thrown for any non-2xx response; carries the server's error code. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

export class ApiClient {
  private readonly base: string;
  private readonly token: string;

  constructor(config: AppConfig) {
    this.base = config.apiBase.replace(/\/$/, '');
    this.token = config.apiToken;
  }

  overview(): Promise<Overview> {
    return this.get('/api/overview');
  }

  employees(risk: RiskFilter, sort: SortKey): Promise<EmployeeList> {
    return this.get(`/api/employees?risk=${risk}&sort=${sort}`);
  }

  employee(id: string): Promise<EmployeeDetail> {
    return this.get(`/api/employees/${encodeURIComponent(id)}`);
  }

  model(): Promise<ModelInfo> {
    return this.get('/api/model');
  }

  whatif(id: string, overrides: Record<string, string>): Promise<WhatifResult> {
    return this.post('/api/whatif', { id, overrides });
  }

  screen(candidate: Record<string, string>, candidateId: string): Promise<ScreenResult> {
    return this.post('/api/screen', { candidate, candidate_id: candidateId });
  }

  private get<T>(path: string): Promise<T> {
    return this.request(path, { method: 'GET', headers: this.headers(false) });
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request(path, {
      method: 'POST',
      headers: this.headers(true),
      body: JSON.stringify(body),
    });
  }

  private headers(hasBody: boolean): Record<string, string> {
    const h: Record<string, string> = {};
    if (hasBody) h['content-type'] = 'application/json';
    if (this.token) h['authorization'] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(path: string, init: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, 'unreachable', `cannot reach the model server: ${err}`);
    }
    if (!response.ok) {
      let code = 'http_error';
      let message = `${response.status} ${response.statusText}`;
      try {
        const body = (await response.json()) as ApiErrorBody;
        if (body.error) {
          code = body.error.code;
          message = body.error.message;
        }
      } catch {
        // non-JSON error body, keep the status line
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }
}
