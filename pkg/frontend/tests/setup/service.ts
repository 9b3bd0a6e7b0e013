/** Spawns the consultation service for the test run and provides its URL. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

declare module "vitest" {
  interface ProvidedContext {
    apiBase: string;
  }
}

let service: ChildProcess | undefined;
let dataDir: string | undefined;

export default async function setup(ctx: {
  provide: (key: "apiBase", value: string) => void;
}): Promise<() => void> {
  dataDir = mkdtempSync(join(tmpdir(), "dw-ui-"));
  service = spawn(
    process.env.DW_PYTHON ?? "python3",
    ["-m", "decision_workbench.cli", "serve", "--port", "0", "--data-dir", dataDir],
    { stdio: ["ignore", "pipe", "inherit"], cwd: join(import.meta.dirname, "..", "..") },
  );

  const base = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("service did not start in time")), 20000);
    let buffered = "";
    service!.stdout!.on("data", (chunk: Buffer) => {
      buffered += chunk.toString();
      const match = buffered.match(/serving on (http:\/\/[\d.]+:\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    service!.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`service exited before it was ready (code ${code})`));
    });
  });

  ctx.provide("apiBase", base);
  return () => {
    service?.kill();
    if (dataDir) rmSync(dataDir, { recursive: true, force: true });
  };
}
