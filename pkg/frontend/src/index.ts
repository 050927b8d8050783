/**
 * Node binding for the kotowari Japanese morphological analyzer.
 *
 * The binding talks to the `kotowari` command-line tool rather than
 * linking against the engine: dictionary metadata comes from
 * `kotowari dict-info --json`, and analysis runs through a single
 * long-lived `kotowari analyze` child process whose node format exposes
 * the surface, the unknown flag and every feature field of each token.
 * The child is spawned once per Tagger and reused for every call.
 */

import { execFile, spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import { createInterface, type Interface } from "node:readline";

/** Whitespace the analyzer skips between tokens: ASCII and ideographic space. */
const SPACES = new Set([" ", "　"]);

export interface TaggerOptions {
  /**
   * Dictionary file or directory.  When omitted the engine falls back
   * to the KOTOWARI_DICDIR environment variable and then to its bundled
   * dictionary.
   */
  dicdir?: string;
  /** Command invoking the analyzer; defaults to ["kotowari"] on PATH. */
  command?: string[];
}

/**
 * Feature fields of one token, keyed by the loaded dictionary's field
 * and role names (lemma, pos1, reading, ...).  Absent fields are null,
 * never the empty string.
 */
export type Feature = Record<string, string | null>;

/** One analysis result: a surface span with structured features. */
export interface Word {
  surface: string;
  /** True when the token came from an unknown-word template. */
  isUnknown: boolean;
  /** Character offsets [start, end) of the surface within its input line. */
  span: [number, number];
  feature: Feature;
}

/** Metadata reported by the loaded dictionary. */
export interface DictionaryInfo {
  name: string;
  version: string;
  entryCount: number;
  /** Ordered feature field names. */
  fields: string[];
  /** Named roles (lemma, pos1, ...) mapped to field indices. */
  roles: Record<string, number>;
}

interface PendingRequest {
  lines: string[];
  lineIndex: number;
  scanPos: number;
  tokens: Word[];
  resolve: (words: Word[]) => void;
  reject: (err: Error) => void;
}

interface Session {
  child: ChildProcessWithoutNullStreams;
  reader: Interface;
  info: DictionaryInfo;
  queue: PendingRequest[];
  stderr: string;
  exited: boolean;
}

function runDictInfo(command: string[], dicdir?: string): Promise<DictionaryInfo> {
  const args = [...command.slice(1), "dict-info", "--json"];
  if (dicdir !== undefined) args.push("-d", dicdir);
  return new Promise((resolve, reject) => {
    execFile(command[0], args, { encoding: "utf8" }, (err, stdout, stderr) => {
      if (err) {
        // non-zero exit carries the engine's full diagnostic on stderr
        const detail = stderr.trim() || err.message;
        reject(new Error(`tagger initialization failed:\n${detail}`));
        return;
      }
      const raw = JSON.parse(stdout);
      resolve({
        name: raw.dictionary_name,
        version: raw.dictionary_version,
        entryCount: raw.entry_count,
        fields: raw.schema.fields,
        roles: raw.schema.roles,
      });
    });
  });
}

/** Node format exposing surface, unknown flag and all feature fields. */
function buildTemplate(fieldCount: number): string {
  let template = "%m\\t%s";
  for (let i = 0; i < fieldCount; i++) template += `\\t%f[${i}]`;
  return template;
}

/**
 * Morphological analyzer bound to the kotowari engine.
 *
 * Construction is cheap; the first call starts the engine process and
 * loads the dictionary (the expensive part), and every later call
 * reuses that process.  Calls may overlap freely: requests are queued
 * and answered in order.
 */
export class Tagger {
  /** Engine processes started so far, across all Tagger instances. */
  static constructionCount = 0;

  private readonly options: TaggerOptions;
  private session: Promise<Session> | null = null;

  constructor(options: TaggerOptions = {}) {
    this.options = options;
  }

  private ensureSession(): Promise<Session> {
    if (this.session === null) this.session = this.start();
    return this.session;
  }

  private async start(): Promise<Session> {
    const command = this.options.command ?? ["kotowari"];
    // dict-info shares the engine's dictionary discovery, so any load
    // failure is reported here with the full diagnostic before we
    // commit to a long-lived child.
    const info = await runDictInfo(command, this.options.dicdir);

    const args = [...command.slice(1), "analyze", "-F", buildTemplate(info.fields.length)];
    if (this.options.dicdir !== undefined) args.push("-d", this.options.dicdir);
    const child = spawn(command[0], args, { stdio: ["pipe", "pipe", "pipe"] });
    Tagger.constructionCount += 1;

    const session: Session = {
      child,
      reader: createInterface({ input: child.stdout }),
      info,
      queue: [],
      stderr: "",
      exited: false,
    };
    child.stderr.setEncoding("utf8");
    child.stderr.on("data", (chunk: string) => {
      session.stderr += chunk;
    });
    child.on("close", () => {
      session.exited = true;
      const reason = new Error(
        `analyzer process exited unexpectedly\n${session.stderr.trim()}`,
      );
      for (const pending of session.queue.splice(0)) pending.reject(reason);
    });
    session.reader.on("line", (line) => this.consumeLine(session, line));
    return session;
  }

  private consumeLine(session: Session, line: string): void {
    const pending = session.queue[0];
    if (pending === undefined) return;
    if (line === "EOS") {
      pending.lineIndex += 1;
      pending.scanPos = 0;
      if (pending.lineIndex === pending.lines.length) {
        session.queue.shift();
        pending.resolve(pending.tokens);
      }
      return;
    }
    pending.tokens.push(this.parseToken(session, pending, line));
  }

  private parseToken(session: Session, pending: PendingRequest, line: string): Word {
    const parts = line.split("\t");
    const surface = parts[0];
    const feature: Feature = {};
    const { fields, roles } = session.info;
    for (let i = 0; i < fields.length; i++) {
      const value = parts[i + 2];
      feature[fields[i]] = value === undefined || value === "" ? null : value;
    }
    for (const [role, index] of Object.entries(roles)) {
      feature[role] = feature[fields[index]];
    }

    // locate the surface within its input line, skipping the whitespace
    // the engine dropped between tokens
    const source = pending.lines[pending.lineIndex];
    let start = pending.scanPos;
    while (start < source.length && SPACES.has(source[start])) start += 1;
    if (!source.startsWith(surface, start)) {
      const found = source.indexOf(surface, start);
      if (found >= 0) start = found;
    }
    const end = start + surface.length;
    pending.scanPos = end;

    return { surface, isUnknown: parts[1] === "1", span: [start, end], feature };
  }

  /**
   * Analyze text into a materialized, ordered list of words.
   *
   * Each input line is one analysis unit; spans are character offsets
   * within their line.  Input lines must not themselves consist of the
   * literal text "EOS" or contain tab characters, since the engine's
   * line protocol uses both as delimiters.
   */
  async tag(text: string): Promise<Word[]> {
    const session = await this.ensureSession();
    if (session.exited) {
      throw new Error(`analyzer process exited unexpectedly\n${session.stderr.trim()}`);
    }
    const lines = text.split("\n");
    return new Promise<Word[]>((resolve, reject) => {
      session.queue.push({
        lines,
        lineIndex: 0,
        scanPos: 0,
        tokens: [],
        resolve,
        reject,
      });
      session.child.stdin.write(lines.join("\n") + "\n");
    });
  }

  /** Surfaces joined by single spaces, one output line per input line. */
  async wakati(text: string): Promise<string> {
    const perLine = await Promise.all(text.split("\n").map((line) => this.tag(line)));
    return perLine
      .map((words) => words.map((w) => w.surface).join(" "))
      .join("\n");
  }

  /** Metadata of the loaded dictionary. */
  async dictionaryInfo(): Promise<DictionaryInfo> {
    return (await this.ensureSession()).info;
  }

  /** Terminate the engine process.  The tagger restarts it if called again. */
  async close(): Promise<void> {
    if (this.session === null) return;
    const pending = this.session;
    this.session = null;
    try {
      const session = await pending;
      session.child.stdin.end();
      session.child.kill();
    } catch {
      // construction already failed; nothing to shut down
    }
  }
}
