/** Serving loops: stdio (one line in, one line out) and single-client TCP. */

import * as net from "node:net";
import * as readline from "node:readline";

import { Handlers, handleLine } from "./protocol.js";

export function runStdio(handlers: Handlers): Promise<void> {
  return new Promise((resolve) => {
    const rl = readline.createInterface({ input: process.stdin, terminal: false });
    rl.on("line", (line) => {
      if (line.trim().length === 0) return;
      process.stdout.write(handleLine(line, handlers) + "\n");
    });
    rl.on("close", resolve);
  });
}

export function runTcp(port: number, handlers: Handlers): net.Server {
  const server = net.createServer((socket) => {
    const rl = readline.createInterface({ input: socket, terminal: false });
    rl.on("line", (line) => {
      if (line.trim().length === 0) return;
      socket.write(handleLine(line, handlers) + "\n");
    });
    socket.on("error", () => socket.destroy());
  });
  server.listen(port);
  return server;
}
