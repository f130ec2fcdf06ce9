import { ApiClient } from './api.js'
import { App } from './app.js'

const app = new App(
  document.getElementById('app')!,
  new ApiClient(''),
  {
    getHash: () => window.location.hash,
    setHash: (hash: string) => { window.location.hash = hash },
  },
)

window.addEventListener('hashchange', () => { void app.init() })
void app.init()
