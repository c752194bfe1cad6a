/** Minimal hash router for the drill-down path:
 *   #/                        submit form + stored projects
 *   #/project/:name/:sha      top-10 bar chart
 *   #/packages/:name/:sha     package treemap
 *   #/files/:name/:sha/:pkg   file treemap for one package
 */

export type Route =
  | { page: 'home' }
  | { page: 'project'; name: string; sha: string }
  | { page: 'packages'; name: string; sha: string }
  | { page: 'files'; name: string; sha: string; pkg: string };

export function parseRoute(hash: string): Route {
  const parts = hash.replace(/^#\/?/, '').split('/').filter(Boolean).map(decodeURIComponent);
  if (parts[0] === 'project' && parts.length === 3) {
    return { page: 'project', name: parts[1], sha: parts[2] };
  }
  if (parts[0] === 'packages' && parts.length === 3) {
    return { page: 'packages', name: parts[1], sha: parts[2] };
  }
  if (parts[0] === 'files' && parts.length === 4) {
    return { page: 'files', name: parts[1], sha: parts[2], pkg: parts[3] };
  }
  return { page: 'home' };
}

export function routeHash(route: Route): string {
  switch (route.page) {
    case 'home':
      return '#/';
    case 'project':
      return `#/project/${encodeURIComponent(route.name)}/${route.sha}`;
    case 'packages':
      return `#/packages/${encodeURIComponent(route.name)}/${route.sha}`;
    case 'files':
      return `#/files/${encodeURIComponent(route.name)}/${route.sha}/${encodeURIComponent(route.pkg)}`;
  }
}

export function navigate(route: Route): void {
  window.location.hash = routeHash(route);
}
