// Typed client for the local session service. The console never computes
// statistics itself: everything it shows comes back from these endpoints.

export interface TrialRow {
  i: string
  x: number
  y: number
  count: number
  rx: number
  ex: number
  tx: number
  id: string
}

export interface Recommended {
  x: number
  rx: number
  stage: string
}

export interface MuSig {
  mu: number | null
  sig: number | null
  status: string
}

export interface Snapshot {
  id: string
  version: number
  prompt: 'title' | 'units' | 'bl' | 'trial' | 'n2' | 'n3' | 'plam' | 'done'
  recommended: Recommended | null
  next_run: number
  finished: boolean
  suspended: string | null
  title: string | null
  units: string | null
  config: SessionConfig
  phase: number
  n2: number | null
  n3: number | null
  p: number | null
  lam: number | null
  en: number[]
  trials: TrialRow[]
  notices: string[]
  musig: MuSig | null
}

export interface SessionConfig {
  procedure: number
  mlo: number
  mhi: number
  sg: number
  term1?: boolean
  bl?: [number, number, number] | null
  reso?: number
  ln?: boolean
}

export interface SessionListing {
  id: string
  title: string | null
  prompt: string
  runs: number
  finished: boolean
}

export interface SeriesLayer {
  type: string
  data?: unknown[]
  marker?: string
  slope?: number
  intercept?: number
  style?: string
  columns?: string[]
  [extra: string]: unknown
}

export interface Series {
  kind: number
  kind_name: string
  x_label: string
  y_label: string
  titles: Record<string, string>
  layers: Record<string, SeriesLayer>
}

export interface SeriesOptions {
  conf?: number
  J?: number
  p?: number
  q?: number
  confs?: number[]
}

export class ApiError extends Error {
  constructor(readonly status: number, reason: string) {
    super(reason)
  }
}

async function decode<T>(resp: Response): Promise<T> {
  const text = await resp.text()
  let body: unknown = text
  try { body = JSON.parse(text) } catch { /* non-JSON payload */ }
  if (!resp.ok) {
    const reason = (body as { error?: string })?.error ?? resp.statusText
    throw new ApiError(resp.status, reason)
  }
  return body as T
}

function seriesQuery(kind: number, opts: SeriesOptions): string {
  const q = new URLSearchParams({ kind: String(kind) })
  if (opts.conf !== undefined) q.set('conf', String(opts.conf))
  if (opts.J !== undefined) q.set('J', String(opts.J))
  if (opts.p !== undefined) q.set('p', String(opts.p))
  if (opts.q !== undefined) q.set('q', String(opts.q))
  if (opts.confs !== undefined) q.set('confs', opts.confs.join(','))
  return q.toString()
}

export class ApiClient {
  constructor(readonly base = '') {}

  private url(path: string): string {
    return this.base + path
  }

  createSession(config: SessionConfig): Promise<Snapshot> {
    return fetch(this.url('/api/sessions'), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(config),
    }).then(r => decode<Snapshot>(r))
  }

  listSessions(): Promise<{ sessions: SessionListing[] }> {
    return fetch(this.url('/api/sessions')).then(r => decode(r))
  }

  getState(id: string): Promise<Snapshot> {
    return fetch(this.url(`/api/sessions/${id}`)).then(r => decode<Snapshot>(r))
  }

  postResponse(id: string, x: number, y: number, version: number): Promise<Snapshot> {
    return fetch(this.url(`/api/sessions/${id}/response`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ x, y, version }),
    }).then(r => decode<Snapshot>(r))
  }

  postParameter(id: string, which: string, value: unknown, version: number): Promise<Snapshot> {
    return fetch(this.url(`/api/sessions/${id}/parameter`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ which, value, version }),
    }).then(r => decode<Snapshot>(r))
  }

  undo(id: string, k: number, version: number): Promise<Snapshot> {
    return fetch(this.url(`/api/sessions/${id}/undo`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ k, version }),
    }).then(r => decode<Snapshot>(r))
  }

  getSeries(id: string, kind: number, opts: SeriesOptions = {}): Promise<Series> {
    return fetch(this.url(`/api/sessions/${id}/series?${seriesQuery(kind, opts)}`))
      .then(r => decode<Series>(r))
  }

  exportUrl(id: string): string {
    return this.url(`/api/sessions/${id}/export`)
  }

  svgUrl(id: string, kind: number, opts: SeriesOptions = {}): string {
    return this.url(`/api/sessions/${id}/svg?${seriesQuery(kind, opts)}`)
  }
}
