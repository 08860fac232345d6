// Conformance flow against a live backend: compile the T-shirt model, start
// the real HTTP service, and drive the rendered UI by clicking buttons.

import { ChildProcess, spawn, spawnSync } from 'node:child_process';
import { mkdtempSync, rmSync, writeFileSync } from 'node:fs';
import { Socket, createServer } from 'node:net';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ConfiguratorClient } from '../src/api.js';
import { App } from '../src/app.js';
import { enabledValues } from '../src/render.js';

const TSHIRT = JSON.stringify({
  variables: [
    { name: 'color', values: ['black', 'white', 'red', 'blue'] },
    { name: 'size', values: ['small', 'medium', 'large'] },
    { name: 'print', values: ['MIB', 'STW'] },
  ],
  rules: ['print=MIB => color=black', 'print=STW => size!=small'],
});

let workDir: string;
let server: ChildProcess | null = null;
let base: string;

async function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const probe = createServer();
    probe.once('error', reject);
    probe.listen(0, '127.0.0.1', () => {
      const address = probe.address();
      if (address === null || typeof address === 'string') {
        reject(new Error('no port assigned'));
        return;
      }
      probe.close(() => resolvePort(address.port));
    });
  });
}

function tcpUp(port: number): Promise<boolean> {
  return new Promise((resolveUp) => {
    const socket = new Socket();
    socket.once('error', () => {
      socket.destroy();
      resolveUp(false);
    });
    socket.connect(port, '127.0.0.1', () => {
      socket.destroy();
      resolveUp(true);
    });
  });
}

async function waitForServer(port: number, url: string, attempts = 100): Promise<void> {
  for (let i = 0; i < attempts; i++) {
    if (await tcpUp(port)) {
      const response = await fetch(url);
      if (response.ok) return;
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error(`server at ${url} never became ready`);
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), 'vdconf-ui-'));
  const modelPath = join(workDir, 'tshirt.json');
  const artifactPath = join(workDir, 'tshirt.vdc');
  writeFileSync(modelPath, TSHIRT);
  const compiled = spawnSync(
    'python3',
    ['-m', 'vdconf.cli', 'compile', modelPath, '-o', artifactPath],
    { encoding: 'utf-8' },
  );
  if (compiled.status !== 0) {
    throw new Error(`compile failed: ${compiled.stderr}`);
  }
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  server = spawn(
    'python3',
    ['-m', 'vdconf.cli', 'serve', artifactPath, '--port', String(port)],
    { stdio: ['ignore', 'ignore', 'pipe'] },
  );
  let bootLog = '';
  server.stderr?.on('data', (chunk) => {
    bootLog += String(chunk);
  });
  server.on('exit', (code) => {
    if (code !== null && code !== 0) {
      console.error(`server exited with ${code}: ${bootLog}`);
    }
  });
  await waitForServer(port, `${base}/model`);
});

afterAll(() => {
  server?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

function mountApp(): { app: App; view: HTMLElement } {
  document.body.innerHTML = '<main id="configurator"></main>';
  const view = document.getElementById('configurator') as HTMLElement;
  const app = new App(view, new ConfiguratorClient(base));
  return { app, view };
}

function button(view: HTMLElement, variable: string, value: string): HTMLButtonElement {
  const node = view.querySelector<HTMLButtonElement>(
    `[data-variable="${variable}"][data-value="${value}"]`,
  );
  if (node === null) throw new Error(`missing button ${variable}=${value}`);
  return node;
}

describe('UI conformance against the live service', () => {
  it('initially renders 9 enabled values across 3 groups', async () => {
    const { app, view } = mountApp();
    await app.init();
    expect(view.querySelectorAll('.variable-group')).toHaveLength(3);
    expect(enabledValues(view).size).toBe(9);
    expect(view.querySelector('#solution-count')?.textContent).toContain('11');
  });

  it('clicking STW disables small', async () => {
    const { app, view } = mountApp();
    await app.init();
    expect(button(view, 'size', 'small').disabled).toBe(false);
    button(view, 'print', 'STW').click();
    await app.settled();
    expect(button(view, 'size', 'small').disabled).toBe(true);
    expect(button(view, 'size', 'medium').disabled).toBe(false);
    expect(button(view, 'size', 'large').disabled).toBe(false);
  });

  it('clicking small on a fresh session completes to (black, small, MIB)', async () => {
    const { app, view } = mountApp();
    await app.init();
    button(view, 'size', 'small').click();
    await app.settled();
    const banner = view.querySelector('#completion-banner');
    expect(banner).not.toBeNull();
    expect(banner?.textContent).toContain('(black, small, MIB)');
  });

  it('undo restores the prior enabled set exactly', async () => {
    const { app, view } = mountApp();
    await app.init();
    const before = enabledValues(view);
    button(view, 'print', 'STW').click();
    await app.settled();
    expect(enabledValues(view)).not.toEqual(before);
    const undoBtn = view.querySelector<HTMLButtonElement>('#undo-btn');
    undoBtn?.click();
    await app.settled();
    expect(enabledValues(view)).toEqual(before);
  });

  it('reloading and resuming the session renders identically', async () => {
    const first = mountApp();
    await first.app.init();
    first.view.querySelector<HTMLButtonElement>('[data-value="STW"]')?.click();
    await first.app.settled();
    const rendered = first.view.innerHTML;
    const sessionId = first.app.session;
    expect(sessionId).not.toBeNull();

    const second = mountApp();
    await second.app.resume(sessionId as string);
    expect(second.view.innerHTML).toBe(rendered);
  });
});
