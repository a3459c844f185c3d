import { readFileSync } from 'node:fs';
import { createServer, type IncomingMessage, type Server, type ServerResponse } from 'node:http';
import { join } from 'node:path';

/**
 * Tiny HTTP server replaying captured model-server responses, so view
 * tests exercise the real request path end to end without the Python
 * process. Fixtures are verbatim JSON bodies from a live server.
 */

function fixture(name: string): unknown {
  // the runner's cwd is the frontend package root
  const path = join(process.cwd(), 'tests', 'fixtures', name);
  return JSON.parse(readFileSync(path, 'utf8'));
}

const overview = fixture('overview.json');
const employees = fixture('employees.json');
const employee1 = fixture('employee_1.json');
const model = fixture('model.json');
const whatifEmpty = fixture('whatif_empty.json');
const whatifOvertime = fixture('whatif_overtime.json');
const screen = fixture('screen.json');

export interface FixtureServer {
  port: number;
  /** authorization header seen on the most recent request, if any */
  lastAuth: string | undefined;
  /** parsed body of the most recent POST /api/whatif */
  lastWhatifBody: unknown;
  close(): Promise<void>;
}

function readBody(req: IncomingMessage): Promise<string> {
  return new Promise((resolve) => {
    let data = '';
    req.on('data', (chunk) => {
      data += chunk;
    });
    req.on('end', () => resolve(data));
  });
}

function send(res: ServerResponse, status: number, body: unknown): void {
  res.writeHead(status, { 'content-type': 'application/json' });
  res.end(JSON.stringify(body));
}

export function startFixtureServer(): Promise<FixtureServer> {
  const state: { lastAuth: string | undefined; lastWhatifBody: unknown } = {
    lastAuth: undefined,
    lastWhatifBody: undefined,
  };

  const server: Server = createServer((req, res) => {
    void handle(req, res);
  });

  async function handle(req: IncomingMessage, res: ServerResponse): Promise<void> {
    state.lastAuth = req.headers.authorization;
    const url = new URL(req.url ?? '/', 'http://localhost');
    const path = url.pathname;

    if (req.method === 'GET' && path === '/api/overview') return send(res, 200, overview);
    if (req.method === 'GET' && path === '/api/employees') return send(res, 200, employees);
    if (req.method === 'GET' && path === '/api/employees/1') return send(res, 200, employee1);
    if (req.method === 'GET' && path === '/api/model') return send(res, 200, model);

    if (req.method === 'POST' && path === '/api/whatif') {
      const body = JSON.parse(await readBody(req)) as { overrides?: object };
      state.lastWhatifBody = body;
      const empty = Object.keys(body.overrides ?? {}).length === 0;
      return send(res, 200, empty ? whatifEmpty : whatifOvertime);
    }
    if (req.method === 'POST' && path === '/api/screen') {
      await readBody(req);
      return send(res, 200, screen);
    }

    send(res, 404, { error: { code: 'not_found', message: `no route for ${path}` } });
  }

  return new Promise((resolve) => {
    server.listen(0, '127.0.0.1', () => {
      const address = server.address();
      const port = typeof address === 'object' && address ? address.port : 0;
      resolve({
        port,
        get lastAuth() {
          return state.lastAuth;
        },
        get lastWhatifBody() {
          return state.lastWhatifBody;
        },
        close: () =>
          new Promise<void>((done) => {
            server.close(() => done());
          }),
      });
    });
  });
}
