// Operator console: new-test wizard, live stress/response entry with
// phase-boundary prompts, charts and the confidence explorer, undo and
// export. The service snapshot is the single source of truth; reloading
// the page rebuilds the exact view from it.

import { ApiClient, ApiError, Snapshot, SessionConfig, SeriesOptions } from './api.js'
import { renderSeries } from './charts.js'

const PROCEDURES: Record<number, string> = {
  1: 'quarter-point search (3-stage)',
  2: 'expanding search (D-optimal close)',
  3: 'constant-step up-down',
  4: 'memory up-down (averaging)',
}

// the fifteen explorer entries: confidence target x method set
const J_ENTRIES: Array<[number, string]> = [
  [1, 'p — FM'], [2, 'q — FM'], [3, 'p & q — FM'],
  [4, 'q — LR'],
  [5, 'p — GLM'], [6, 'q — GLM'], [7, 'p & q — GLM'],
  [8, 'p — FM+LR'], [9, 'q — FM+LR'],
  [10, 'p — FM+GLM'], [11, 'q — FM+GLM'],
  [12, 'p — LR+GLM'], [13, 'q — LR+GLM'],
  [14, 'p — FM+LR+GLM'], [15, 'q — FM+LR+GLM'],
]

const BL_HELP = `Up-down rule picker: i selects the transformed-response rule
(1 targets the median; 3, 5, 7 need runs of responses and target .707107,
.793701, .840896; 2, 4, 6 are the compound rules at .596968, .733614,
.804119). Enter BL as nRev and two i values — i1 for a high-quantile test,
i2 for the mirrored low-quantile test; one 0 is OK.`

function h<K extends keyof HTMLElementTagNameMap>(
  tag: K, attrs: Record<string, string> = {}, ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  for (const [k, v] of Object.entries(attrs)) {
    if (k === 'class') node.className = v
    else node.setAttribute(k, v)
  }
  node.append(...children)
  return node
}

function fmtNum(v: number | null | undefined, places = 5): string {
  if (v === null || v === undefined || !Number.isFinite(v)) return 'NA'
  const s = v.toFixed(places)
  return s.replace(/(\.\d*?)0+$/, '$1').replace(/\.$/, '')
}

export class App {
  private snap: Snapshot | null = null
  private explorerKind = 3
  private chartKind = 1

  constructor(private root: HTMLElement, private api: ApiClient,
              private nav: { getHash(): string; setHash(h: string): void }) {}

  async init(): Promise<void> {
    const m = /s=([\w-]+)/.exec(this.nav.getHash())
    if (m) {
      try {
        this.snap = await this.api.getState(m[1])
        await this.renderSession()
        return
      } catch (e) {
        console.error('session restore failed:', e)
        this.nav.setHash('')
      }
    }
    await this.renderHome()
  }

  // ------------------------------------------------------------------ home

  private async renderHome(): Promise<void> {
    this.root.replaceChildren()
    const wizard = h('form', { class: 'wizard', id: 'wizard' })
    wizard.append(
      h('h2', {}, 'New test'),
      labelled('Procedure', h('select', { id: 'w-proc' },
        ...Object.entries(PROCEDURES).map(([v, name]) =>
          h('option', { value: v }, `${v} — ${name}`)))),
      labelled('Lower start (mlo)', numInput('w-mlo', '0')),
      labelled('Upper start (mhi)', numInput('w-mhi', '0')),
      labelled('Scale guess (sg)', numInput('w-sg', '0')),
      labelled('Resolution (reso)', numInput('w-reso', '0')),
      labelled('Log scale', h('input', { id: 'w-ln', type: 'checkbox' })),
      labelled('Title', h('input', { id: 'w-title', value: 'test' })),
      labelled('Units', h('input', { id: 'w-units', value: 'X' })),
      h('div', { class: 'bl-block', id: 'w-bl-block' },
        h('p', { class: 'help' }, BL_HELP),
        labelled('BL: nRev', numInput('w-nrev', '4')),
        labelled('BL: i1', numInput('w-i1', '1')),
        labelled('BL: i2', numInput('w-i2', '0'))),
      h('button', { id: 'w-create', type: 'submit' }, 'Start test'),
      h('p', { class: 'error', id: 'w-error' }),
    )
    const procSel = wizard.querySelector<HTMLSelectElement>('#w-proc')!
    const blBlock = wizard.querySelector<HTMLElement>('#w-bl-block')!
    const syncBl = () => {
      blBlock.style.display = ['3', '4'].includes(procSel.value) ? '' : 'none'
    }
    procSel.addEventListener('change', syncBl)
    syncBl()
    wizard.addEventListener('submit', async ev => {
      ev.preventDefault()
      try {
        await this.createFromWizard(wizard)
      } catch (e) {
        wizard.querySelector('#w-error')!.textContent = String((e as Error).message)
      }
    })

    const listBox = h('div', { class: 'session-list' }, h('h2', {}, 'Sessions'))
    const { sessions } = await this.api.listSessions()
    const ul = h('ul', {})
    for (const s of sessions) {
      const a = h('a', { href: `#s=${s.id}` },
        `${s.title ?? '(untitled)'} — ${s.runs} runs — ${s.finished ? 'done' : s.prompt}`)
      a.addEventListener('click', async ev => {
        ev.preventDefault()
        this.nav.setHash(`s=${s.id}`)
        this.snap = await this.api.getState(s.id)
        await this.renderSession()
      })
      ul.appendChild(h('li', {}, a))
    }
    listBox.appendChild(sessions.length ? ul : h('p', {}, 'none yet'))
    this.root.append(h('h1', {}, 'quantal operator console'), wizard, listBox)
  }

  private async createFromWizard(wizard: HTMLElement): Promise<void> {
    const val = (id: string) => wizard.querySelector<HTMLInputElement>(`#${id}`)!.value
    const proc = Number(wizard.querySelector<HTMLSelectElement>('#w-proc')!.value)
    const cfg: SessionConfig = {
      procedure: proc,
      mlo: Number(val('w-mlo')),
      mhi: Number(val('w-mhi')),
      sg: Number(val('w-sg')),
      reso: Number(val('w-reso')),
      ln: wizard.querySelector<HTMLInputElement>('#w-ln')!.checked,
      bl: null,
    }
    if (proc === 3 || proc === 4) {
      cfg.bl = [Number(val('w-nrev')), Number(val('w-i1')), Number(val('w-i2'))]
    }
    let snap = await this.api.createSession(cfg)
    snap = await this.api.postParameter(snap.id, 'title', val('w-title'), snap.version)
    snap = await this.api.postParameter(snap.id, 'units', val('w-units'), snap.version)
    this.snap = snap
    this.nav.setHash(`s=${snap.id}`)
    await this.renderSession()
  }

  // --------------------------------------------------------------- session

  private async renderSession(): Promise<void> {
    const snap = this.snap!
    this.root.replaceChildren()

    const header = h('div', { class: 'header' },
      h('h1', {}, snap.title ?? '(untitled)'),
      h('p', { class: 'meta', id: 'meta' },
        `${PROCEDURES[snap.config.procedure]} · (${fmtNum(snap.config.mlo)}, ` +
        `${fmtNum(snap.config.mhi)}, ${fmtNum(snap.config.sg)}) · reso ${fmtNum(snap.config.reso ?? 0)}` +
        `${snap.config.ln ? ' · log scale' : ''} · phase ${snap.phase}` +
        ` · n=[${snap.en.join(', ')}]`),
      h('p', { class: 'musig', id: 'musig' },
        snap.musig ? `(Mu, Sig) = (${fmtNum(snap.musig.mu)}, ${fmtNum(snap.musig.sig)})` : ''),
    )

    const notices = h('div', { class: 'notices', id: 'notices' },
      ...snap.notices.map(n => h('p', { class: 'notice' }, n)))
    if (snap.suspended) {
      notices.appendChild(h('p', { class: 'notice suspended' },
        `Test Suspended (${snap.suspended})`))
    }

    const controls = h('div', { class: 'controls' },
      button('undo-btn', 'Undo last entry', async () => {
        const s = this.snap!
        await this.guard(() => this.api.undo(s.id, 1, s.version))
      }),
      h('a', { class: 'button', id: 'export-link', href: this.api.exportUrl(snap.id), download: 'gonogo.txt' },
        'Download run table'),
      h('a', { class: 'button', id: 'svg-link', href: this.api.svgUrl(snap.id, this.chartKind), download: 'plot.svg' },
        'Download SVG'),
    )

    this.root.append(
      header, notices,
      this.promptPanel(),
      controls,
      this.trialTable(),
      h('div', { class: 'charts' },
        h('h2', {}, 'Charts'),
        this.chartTabs(),
        h('div', { id: 'chart-box' })),
      h('div', { class: 'explorer' },
        h('h2', {}, 'Confidence explorer'),
        this.explorerControls(),
        h('div', { id: 'explorer-box' })),
    )
    await this.drawChart()
  }

  private promptPanel(): HTMLElement {
    const snap = this.snap!
    const box = h('div', { class: 'prompt', id: 'prompt-panel' })
    const submit = async (fn: () => Promise<Snapshot>) => this.guard(fn)

    switch (snap.prompt) {
      case 'title':
      case 'units': {
        const field = h('input', { id: 'p-text' })
        box.append(h('p', {}, `Enter ${snap.prompt}:`), field,
          button('p-send', 'Send', () =>
            submit(() => this.api.postParameter(snap.id, snap.prompt, field.value, snap.version))))
        break
      }
      case 'bl': {
        const nrev = numInput('p-nrev', '4')
        const i1 = numInput('p-i1', '1')
        const i2 = numInput('p-i2', '0')
        box.append(h('p', {}, "Enter BL (nRev and two I's (one 0 is OK)):"),
          h('p', { class: 'help' }, BL_HELP), nrev, i1, i2,
          button('p-send', 'Send', () =>
            submit(() => this.api.postParameter(snap.id, 'bl',
              [Number(nrev.value), Number(i1.value), Number(i2.value)], snap.version))))
        break
      }
      case 'trial': {
        const rec = snap.recommended!
        const x = numInput('p-x', String(rec.rx))
        const y = h('select', { id: 'p-y' },
          h('option', { value: '1' }, '1 — response'),
          h('option', { value: '0' }, '0 — no response'))
        box.append(
          h('p', { class: 'recommend', id: 'recommend' },
            `${snap.next_run}. Test at X ~ ${fmtNum(rec.rx)} (stage ${rec.stage}). Enter X & R:`),
          x, y,
          button('p-send', 'Record', () =>
            submit(() => this.api.postResponse(snap.id, Number(x.value),
              Number((y as HTMLSelectElement).value), snap.version))))
        break
      }
      case 'n2':
      case 'n3': {
        const label = snap.prompt === 'n2'
          ? 'Enter Phase II (D-Optimal) size n2:'
          : 'Enter Phase III (S-RMJ) size n3:'
        const field = numInput('p-n', '0')
        box.append(h('p', {}, label), field,
          button('p-send', 'Send', () =>
            submit(() => this.api.postParameter(snap.id, snap.prompt, Number(field.value), snap.version))))
        break
      }
      case 'plam': {
        const p = numInput('p-p', '0.9')
        const lam = numInput('p-lam', '1')
        box.append(h('p', {}, 'Enter p lam:'), p, lam,
          button('p-send', 'Send', () =>
            submit(() => this.api.postParameter(snap.id, 'plam',
              [Number(p.value), Number(lam.value)], snap.version))))
        break
      }
      case 'done':
        box.append(h('p', { class: 'done-banner', id: 'done-banner' }, 'Test complete.'))
        break
    }
    return box
  }

  private trialTable(): HTMLElement {
    const snap = this.snap!
    const table = h('table', { class: 'trials', id: 'trials' })
    table.appendChild(h('tr', {},
      ...['i', 'X', 'Y', 'COUNT', 'RX', 'EX', 'TX', 'ID'].map(c => h('th', {}, c))))
    for (const r of snap.trials) {
      table.appendChild(h('tr', {},
        h('td', {}, r.i), h('td', {}, fmtNum(r.x)), h('td', {}, String(r.y)),
        h('td', {}, String(r.count)), h('td', {}, fmtNum(r.rx)),
        h('td', {}, fmtNum(r.ex, 6)), h('td', {}, fmtNum(r.tx)), h('td', {}, r.id)))
    }
    return table
  }

  private chartTabs(): HTMLElement {
    const tabs = h('div', { class: 'tabs' })
    const defs: Array<[number, string]> = [
      [1, 'history'], [2, 'estimates'], [4, 'data'],
    ]
    for (const [kind, label] of defs) {
      tabs.appendChild(button(`tab-${kind}`, label, async () => {
        this.chartKind = kind
        await this.drawChart()
      }))
    }
    return tabs
  }

  private async drawChart(): Promise<void> {
    const snap = this.snap!
    const box = this.root.querySelector<HTMLElement>('#chart-box')
    if (!box) return
    if (!snap.trials.length) {
      box.replaceChildren(h('p', {}, 'no runs yet'))
      return
    }
    try {
      const series = await this.api.getSeries(snap.id, this.chartKind)
      box.replaceChildren(renderSeries(series))
    } catch (e) {
      box.replaceChildren(h('p', { class: 'error' }, (e as Error).message))
    }
    const link = this.root.querySelector<HTMLAnchorElement>('#svg-link')
    if (link) link.href = this.api.svgUrl(snap.id, this.chartKind)
  }

  private explorerControls(): HTMLElement {
    const kindSel = h('select', { id: 'ex-kind' },
      h('option', { value: '3' }, 'response curve + bounds'),
      h('option', { value: '5' }, 'joint LR regions'),
      h('option', { value: '6' }, 'joint + individual LR'),
      h('option', { value: '7' }, 'LR bounds at p or q'),
      h('option', { value: '8' }, 'linearized, three methods'))
    const conf = numInput('ex-conf', '0.95')
    const jSel = h('select', { id: 'ex-j' },
      ...J_ENTRIES.map(([v, label]) => h('option', { value: String(v) }, `J=${v}: ${label}`)))
    jSel.value = '15'
    const p = numInput('ex-p', '')
    const q = numInput('ex-q', '')
    const go = button('ex-go', 'Plot', async () => {
      const snap = this.snap!
      const kind = Number(kindSel.value)
      const opts: SeriesOptions = {}
      if (kind === 3 || kind === 7 || kind === 8) opts.conf = Number(conf.value)
      if (kind === 3) opts.J = Number(jSel.value)
      if (kind === 5 || kind === 6) opts.confs = conf.value.split(/[ ,]+/).map(Number)
      if ((kind === 6 || kind === 7) && p.value) opts.p = Number(p.value)
      if ((kind === 6 || kind === 7) && q.value) opts.q = Number(q.value)
      const box = this.root.querySelector<HTMLElement>('#explorer-box')!
      try {
        const series = await this.api.getSeries(snap.id, kind, opts)
        box.replaceChildren(renderSeries(series))
        const dl = h('a', {
          class: 'button', href: this.api.svgUrl(snap.id, kind, opts), download: 'plot.svg',
        }, 'Download this plot as SVG')
        box.appendChild(dl)
      } catch (e) {
        box.replaceChildren(h('p', { class: 'error' }, (e as Error).message))
      }
    })
    return h('div', { class: 'explorer-controls' },
      labelled('Plot', kindSel), labelled('conf (or list)', conf),
      labelled('J', jSel), labelled('p', p), labelled('q', q), go)
  }

  // ------------------------------------------------------------- plumbing

  private async guard(fn: () => Promise<Snapshot>): Promise<void> {
    try {
      this.snap = await fn()
    } catch (e) {
      if (e instanceof ApiError && e.status === 409) {
        // someone else moved the session: reload the authoritative state
        this.snap = await this.api.getState(this.snap!.id)
        await this.renderSession()
        const panel = this.root.querySelector('#prompt-panel')
        panel?.prepend(h('p', { class: 'error conflict' },
          'Session changed elsewhere; view reloaded — please re-enter.'))
        return
      }
      if (e instanceof ApiError && e.status === 422) {
        this.snap = await this.api.getState(this.snap!.id)
        await this.renderSession()
        const panel = this.root.querySelector('#prompt-panel')
        panel?.prepend(h('p', { class: 'error', id: 'suspend-note' },
          `Test Suspended (${e.message})`))
        return
      }
      throw e
    }
    await this.renderSession()
  }
}

function labelled(text: string, ctrl: HTMLElement): HTMLElement {
  return h('label', { class: 'field' }, h('span', {}, text + ' '), ctrl)
}

function numInput(id: string, value: string): HTMLInputElement {
  return h('input', { id, value, inputmode: 'decimal', size: '8' })
}

function button(id: string, label: string, onclick: () => void | Promise<void>): HTMLButtonElement {
  const b = h('button', { id, type: 'button' }, label)
  b.addEventListener('click', () => { void onclick() })
  return b
}
