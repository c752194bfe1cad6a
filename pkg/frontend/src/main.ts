import { api, ApiError } from './api';
import { pollJob } from './poll';
import { navigate, parseRoute, Route, routeHash } from './router';
import { renderBarChart, renderFileTreemap, renderPackageTreemap } from './views';
import './style.css';

const TREEMAP_WIDTH = 960;
const TREEMAP_HEIGHT = 540;
const LANGUAGES = ['java', 'c', 'cpp', 'csharp', 'python'];

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

function errorBanner(container: HTMLElement, message: string, onRetry?: () => void): void {
  const banner = el('div', 'error-banner', message);
  if (onRetry) {
    const retry = el('button', 'retry', 'Retry');
    retry.addEventListener('click', onRetry);
    banner.appendChild(retry);
  }
  container.prepend(banner);
}

function breadcrumb(container: HTMLElement, route: Route): void {
  const nav = el('nav', 'breadcrumb');
  const home = el('a', undefined, 'projects');
  home.href = routeHash({ page: 'home' });
  nav.appendChild(home);
  if (route.page !== 'home') {
    nav.appendChild(el('span', undefined, ' / '));
    const project = el('a', undefined, route.name);
    project.href = routeHash({ page: 'project', name: route.name, sha: route.sha });
    nav.appendChild(project);
  }
  if (route.page === 'packages' || route.page === 'files') {
    nav.appendChild(el('span', undefined, ' / '));
    const pkgs = el('a', undefined, 'packages');
    pkgs.href = routeHash({ page: 'packages', name: route.name, sha: route.sha });
    nav.appendChild(pkgs);
  }
  if (route.page === 'files') {
    nav.appendChild(el('span', undefined, ` / ${route.pkg}`));
  }
  container.appendChild(nav);
}

async function renderHome(container: HTMLElement): Promise<void> {
  const form = el('form', 'submit-form');
  form.innerHTML = `
    <h2>Analyze a repository</h2>
    <label>Name <input name="name" required></label>
    <label>Git URL <input name="remote_url" required></label>
    <label>Language
      <select name="language">${LANGUAGES.map((l) => `<option>${l}</option>`).join('')}</select>
    </label>
    <label>Commit sha (optional) <input name="sha" pattern="[0-9a-f]{40}"></label>
    <button type="submit">Analyze</button>
    <p class="job-status" hidden></p>
  `;
  const status = form.querySelector<HTMLElement>('.job-status')!;

  form.addEventListener('submit', async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const name = String(data.get('name') ?? '').trim();
    const remoteUrl = String(data.get('remote_url') ?? '').trim();
    if (!name || !remoteUrl) {
      status.hidden = false;
      status.textContent = 'Name and git URL are required.';
      return;
    }
    const sha = String(data.get('sha') ?? '').trim();
    status.hidden = false;
    status.textContent = 'Submitting…';
    try {
      const job = await api.submitAnalysis({
        name,
        remote_url: remoteUrl,
        language: String(data.get('language')),
        ...(sha ? { sha } : {}),
      });
      const final = await pollJob(job.job_id, {
        onUpdate: (j) => {
          const p = j.progress;
          status.textContent = p ? `Running: ${p.done}/${p.total} files` : `State: ${j.state}`;
        },
      });
      if (final.state === 'done' && final.result) {
        navigate({ page: 'project', name: final.result.name, sha: final.result.sha });
      } else {
        status.textContent = `Analysis failed: ${final.error ?? 'unknown error'}`;
      }
    } catch (err) {
      status.textContent =
        err instanceof ApiError ? `Request rejected (${err.status}): ${err.message}` : String(err);
    }
  });
  container.appendChild(form);

  const listing = el('section', 'project-list');
  listing.appendChild(el('h2', undefined, 'Stored results'));
  try {
    const projects = await api.listProjects();
    if (projects.length === 0) {
      listing.appendChild(el('p', 'empty-state', 'No analyses stored yet.'));
    }
    for (const project of projects) {
      for (const version of project.versions) {
        const link = el('a', 'project-link', `${project.name} @ ${version.sha.slice(0, 10)}`);
        link.href = routeHash({ page: 'project', name: project.name, sha: version.sha });
        listing.appendChild(link);
      }
    }
  } catch (err) {
    errorBanner(listing, `Cannot reach the service: ${String(err)}`, () => render());
  }
  container.appendChild(listing);
}

async function renderProject(container: HTMLElement, route: Route & { page: 'project' }): Promise<void> {
  try {
    const project = await api.project(route.name, route.sha);
    const chart = el('section');
    renderBarChart(chart, project);
    container.appendChild(chart);
    const drill = el('a', 'drill-link', 'Explore packages →');
    drill.href = routeHash({ page: 'packages', name: route.name, sha: route.sha });
    container.appendChild(drill);
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      container.appendChild(
        el('p', 'empty-state', `No analysis stored for ${route.name}. Submit one from the home page.`)
      );
    } else {
      errorBanner(container, String(err), () => render());
    }
  }
}

async function renderPackages(container: HTMLElement, route: Route & { page: 'packages' }): Promise<void> {
  try {
    const packages = await api.packages(route.name, route.sha);
    const section = el('section');
    renderPackageTreemap(section, packages, TREEMAP_WIDTH, TREEMAP_HEIGHT, (pkg) =>
      navigate({ page: 'files', name: route.name, sha: route.sha, pkg })
    );
    container.appendChild(section);
  } catch (err) {
    errorBanner(container, String(err), () => render());
  }
}

async function renderFiles(container: HTMLElement, route: Route & { page: 'files' }): Promise<void> {
  try {
    const files = await api.files(route.name, route.sha, route.pkg);
    const section = el('section');
    renderFileTreemap(section, files, TREEMAP_WIDTH, TREEMAP_HEIGHT);
    container.appendChild(section);
  } catch (err) {
    errorBanner(container, String(err), () => render());
  }
}

export async function render(): Promise<void> {
  const app = document.getElementById('app');
  if (!app) return;
  app.textContent = '';
  const route = parseRoute(window.location.hash);
  breadcrumb(app, route);
  const page = el('main');
  app.appendChild(page);
  switch (route.page) {
    case 'home':
      await renderHome(page);
      break;
    case 'project':
      await renderProject(page, route);
      break;
    case 'packages':
      await renderPackages(page, route);
      break;
    case 'files':
      await renderFiles(page, route);
      break;
  }
}

window.addEventListener('hashchange', () => void render());
void render();
