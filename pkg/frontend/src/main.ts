import { ApiClient, HttpTransport } from './api';
import { Workbench } from './app';
import { el } from './render';

// Browser entry point. The workbench attaches to #app and reads/writes its
// state through the URL query string, so any view is shareable by copying
// the address bar. Without a ?session=... parameter a small form lets the
// analyst create one from a history CSV already present in the service's
// data directory.

async function boot(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) return;
  const api = new ApiClient(new HttpTransport(''));
  const query = window.location.search.replace(/^\?/, '');
  const sessionId = new URLSearchParams(query).get('session');

  if (!sessionId) {
    renderCreateForm(root, api);
    return;
  }
  const workbench = new Workbench({
    root,
    api,
    initialQuery: query,
    onStateChange: (encoded) =>
      window.history.replaceState(null, '', `?${encoded}`),
  });
  await workbench.init();
}

function renderCreateForm(root: HTMLElement, api: ApiClient): void {
  const form = el('div', { class: 'create-form' });
  form.appendChild(el('h2', {}, 'rankforge workbench'));
  form.appendChild(
    el(
      'p',
      {},
      'No session in the URL. Paste a session request body (see README) and submit:',
    ),
  );
  const textarea = el('textarea', { rows: '14', cols: '80' });
  textarea.value = JSON.stringify(
    {
      spec: '... spec document ...',
      history: 'history.csv',
      baseline: { rankee_id: 'R01', year: 2024 },
      ranges: [{ attribute_id: 'budget', min: 100, max: 300, step: 50 }],
      rivals: ['R02', 'R03'],
    },
    null,
    2,
  );
  const button = el('button', {}, 'create session');
  const status = el('p', { class: 'create-status' });
  button.addEventListener('click', async () => {
    try {
      const created = await api.createSession(JSON.parse(textarea.value));
      window.location.search = `?session=${created.session_id}`;
    } catch (error) {
      status.textContent = String(error);
    }
  });
  form.appendChild(textarea);
  form.appendChild(button);
  form.appendChild(status);
  root.appendChild(form);
}

void boot();
