export interface TraceRow {
  k: number
  method: string
  n_k: number
  t_k: number
  fhat: number | null
  f_full: number | null
  stationarity: number | null
  dist_to_ref: number | null
  fev: number
  accepted: boolean
  increased: boolean
  r_residual: number | null
}

export const TRACE_COLUMNS = [
  'k', 'method', 'n_k', 't_k', 'fhat', 'f_full', 'stationarity',
  'dist_to_ref', 'fev', 'accepted', 'increased', 'r_residual',
] as const

const num = (s: string): number => {
  const v = Number(s)
  if (!Number.isFinite(v)) throw new Error(`bad numeric field: ${JSON.stringify(s)}`)
  return v
}

const numOrNull = (s: string): number | null => (s === '' ? null : num(s))

export function parseTraceCsv(text: string): TraceRow[] {
  const lines = text.split('\n').filter((l) => l.trim() !== '')
  if (lines.length === 0) throw new Error('empty trace file')
  const header = lines[0].split(',')
  for (const col of TRACE_COLUMNS) {
    if (!header.includes(col)) throw new Error(`missing column ${col} in trace header`)
  }
  const idx = Object.fromEntries(header.map((h, i) => [h, i])) as Record<string, number>
  const rows: TraceRow[] = []
  for (const line of lines.slice(1)) {
    const f = line.split(',')
    if (f.length !== header.length) {
      throw new Error(`row has ${f.length} fields, header has ${header.length}`)
    }
    rows.push({
      k: num(f[idx.k]),
      method: f[idx.method],
      n_k: num(f[idx.n_k]),
      t_k: num(f[idx.t_k]),
      fhat: numOrNull(f[idx.fhat]),
      f_full: numOrNull(f[idx.f_full]),
      stationarity: numOrNull(f[idx.stationarity]),
      dist_to_ref: numOrNull(f[idx.dist_to_ref]),
      fev: num(f[idx.fev]),
      accepted: f[idx.accepted] === 'true',
      increased: f[idx.increased] === 'true',
      r_residual: numOrNull(f[idx.r_residual]),
    })
  }
  if (rows.length === 0) throw new Error('trace file has a header but no rows')
  return rows
}
