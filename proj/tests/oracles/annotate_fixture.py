#!/usr/bin/env python3
"""Brute-force masking-site annotator for the fixture corpus.

Written separately from the C++ library: its own tokenizer, its own
construct and block scanners. Prints per-method and total instance counts
for the token, construct and block levels as JSON, and checks them against
the hand counts in the fixture headers.

usage: annotate_fixture.py METHODS_JAVA [--seed N] [--corpus OUT.jsonl] [--counts OUT.json]
"""

import argparse
import json
import re
import sys

MASK64 = (1 << 64) - 1

KEYWORDS = set("""
abstract assert break case catch class const continue default do else enum
extends final finally for goto if implements import instanceof interface
native new package private protected public return static strictfp super
switch synchronized this throw throws transient try volatile while var yield
record sealed permits
""".split())
TYPE_KEYWORDS = set("boolean byte char short int long float double void".split())
LITERAL_WORDS = {"true", "false", "null"}

OPERATORS = sorted("""
>>>= <<= >>= >>> ... -> :: ++ -- && || == != <= >= += -= *= /= %= &= |= ^= << >>
+ - * / % = < > ! ~ ? : & | ^ ( ) { } [ ] ; , . @
""".split(), key=len, reverse=True)

TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f]+)
  | (?P<nl>\n)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<string>"(?:\\.|[^"\\\n])*")
  | (?P<char>'(?:\\.|[^'\\\n])+')
  | (?P<number>0[xX][0-9a-fA-F_]+[lL]?|(?:\d[\d_]*)?\.?\d[\d_]*(?:[eE][+-]?\d+)?[fFdDlL]?)
  | (?P<annotation>@[A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)
  | (?P<word>[A-Za-z_$][\w$]*)
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(code):
    """Returns [(text, kind, line)] with kind in word/keyword/literal/op."""
    out = []
    pos, line = 0, 1
    while pos < len(code):
        m = TOKEN_RE.match(code, pos)
        if m:
            kind = m.lastgroup
            text = m.group()
            if kind in ("ws",):
                pass
            elif kind == "nl":
                line += 1
            elif kind in ("line_comment", "block_comment"):
                line += text.count("\n")
            elif kind == "word":
                if text in KEYWORDS:
                    out.append((text, "keyword", line))
                elif text in TYPE_KEYWORDS:
                    out.append((text, "type", line))
                elif text in LITERAL_WORDS:
                    out.append((text, "literal", line))
                else:
                    out.append((text, "ident", line))
            else:
                out.append((text, "literal" if kind in ("string", "char", "number") else kind, line))
            pos = m.end()
            continue
        for op in OPERATORS:
            if code.startswith(op, pos):
                out.append((op, "op", line))
                pos += len(op)
                break
        else:
            raise ValueError(f"cannot tokenize at line {line}: {code[pos:pos + 20]!r}")
    return out


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def fnv1a64(text):
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & MASK64
    return h


def keyed_uniform(seed, key, counter, lo, hi):
    state = splitmix64((seed ^ splitmix64(fnv1a64(key))) & MASK64)
    state = splitmix64(state ^ splitmix64(counter))
    bound = hi - lo + 1
    limit = MASK64 - MASK64 % bound
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        r = z ^ (z >> 31)
        if r < limit:
            return lo + r % bound


def matching(tokens, i):
    pairs = {"(": ")", "[": "]", "{": "}"}
    opener, closer = tokens[i][0], pairs[tokens[i][0]]
    depth = 0
    for j in range(i, len(tokens)):
        if tokens[j][0] == opener:
            depth += 1
        elif tokens[j][0] == closer:
            depth -= 1
            if depth == 0:
                return j
    return None


def ratio_ok(masked, total):
    return 2 * masked <= total


# ------------------------------------------------------------------ token level

def token_sites(tokens, method_id, seed):
    by_line = {}
    for idx, (_, _, line) in enumerate(tokens):
        by_line.setdefault(line, []).append(idx)
    sites = []
    for line in sorted(by_line):
        n = len(by_line[line])
        if n <= 1:
            continue
        x = min(keyed_uniform(seed, method_id, line, 1, n - 1), 10)
        sites.append(x)
    return sites


# ------------------------------------------------------------------ constructs

def signature_paren(tokens):
    """Index of the parameter list's "(": the last "(" before the body brace."""
    body = next(i for i, t in enumerate(tokens) if t[0] == "{")
    return max(i for i in range(body) if tokens[i][0] == "(")


def is_call(tokens, i, signature):
    if i == signature or i == 0:
        return False
    prev_text, prev_kind, _ = tokens[i - 1]
    if prev_kind == "ident":
        return True
    if prev_text in ("this", "super", ")", "]"):
        return True
    if prev_text == ">":
        k = i - 1
        while k > 0:
            k -= 1
            if tokens[k][0] == "new":
                return True
            if tokens[k][1] not in ("ident", "type") and tokens[k][0] not in "<>,.?[]":
                return False
    return False


def construct_lengths(tokens):
    signature = signature_paren(tokens)
    lengths = []
    for i, (text, _, _) in enumerate(tokens):
        if text != "(":
            continue
        prev = tokens[i - 1][0] if i > 0 else None
        if prev in ("if", "while", "for", "catch") or is_call(tokens, i, signature):
            close = matching(tokens, i)
            if close is not None and close - i - 1 >= 1:
                lengths.append(close - i - 1)
    return lengths


# ------------------------------------------------------------------ blocks

CONTINUATIONS = ("else", "catch", "finally")


def statement_count(tokens, open_, close):
    """Top-level statements strictly inside tokens[open_..close]."""
    count = 0
    started = False
    first = None
    i = open_ + 1
    while i < close:
        text, kind, _ = tokens[i]
        if not started:
            if text in ("case", "default"):
                # a switch label runs to its ":"
                while tokens[i][0] != ":":
                    i += 1
                i += 1
                continue
            if kind == "ident" and tokens[i + 1][0] == ":":
                i += 2
                continue
            started, first = True, text
        if text in ("(", "["):
            i = matching(tokens, i) + 1
            continue
        if text == "{":
            end = matching(tokens, i)
            prev = tokens[i - 1][0]
            statement_brace = prev in (")", "else", "try", "finally", "do", "{", ";", "}", ":")
            after = tokens[end + 1][0] if end + 1 < close else None
            i = end + 1
            if statement_brace:
                continues = after in CONTINUATIONS or (first == "do" and after == "while")
                if not continues:
                    count += 1
                    started = False
            continue
        if text == ";":
            nxt = tokens[i + 1][0] if i + 1 < close else None
            if nxt not in CONTINUATIONS:
                count += 1
                started = False
        i += 1
    if started:
        count += 1
    return count


def block_lengths(tokens):
    out = []
    for i, (text, _, _) in enumerate(tokens):
        if text == "{":
            close = matching(tokens, i)
            if statement_count(tokens, i, close) <= 2:
                out.append(close - i + 1)
    return out


# ------------------------------------------------------------------ driver

HEADER = re.compile(r"^//// (.*)$")


def read_fixture(path):
    methods, current = [], None
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            m = HEADER.match(raw.rstrip("\n"))
            if m:
                fields = dict(kv.split("=") for kv in m.group(1).split())
                current = {"id": fields.pop("id"), "hand": {k: int(v) for k, v in fields.items()}, "lines": []}
                methods.append(current)
            else:
                current["lines"].append(raw)
    for m in methods:
        m["code"] = "".join(m["lines"]).rstrip("\n") + "\n"
        del m["lines"]
    return methods


def annotate(method, seed):
    tokens = tokenize(method["code"])
    total = len(tokens)
    token_x = token_sites(tokens, method["id"], seed)
    constructs = [n for n in construct_lengths(tokens) if n <= 10]
    blocks = block_lengths(tokens)
    return {
        "id": method["id"],
        "tokens": total,
        "lines": len(token_x),
        "token": sum(ratio_ok(x, total) for x in token_x),
        "construct_sites": len(constructs),
        "construct": sum(ratio_ok(n, total) for n in constructs),
        "block_sites": len(blocks),
        "block": sum(ratio_ok(n, total) for n in blocks),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("fixture")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--corpus")
    ap.add_argument("--counts")
    args = ap.parse_args()

    methods = read_fixture(args.fixture)
    rows = [annotate(m, args.seed) for m in methods]

    mismatches = []
    for m, row in zip(methods, rows):
        hand = m["hand"]
        for key, got in (("lines", row["lines"]), ("constructs", row["construct_sites"]),
                         ("blocks", row["block_sites"])):
            if hand.get(key) != got:
                mismatches.append(f"{m['id']}: {key} hand={hand.get(key)} script={got}")

    totals = {k: sum(r[k] for r in rows) for k in ("token", "construct", "block")}
    doc = {"seed": args.seed, "methods": len(rows), "totals": totals, "per_method": rows}

    if args.corpus:
        with open(args.corpus, "w", encoding="utf-8") as fh:
            for m in methods:
                fh.write(json.dumps({"id": m["id"], "domain": "fixture", "code": m["code"]}) + "\n")
    text = json.dumps(doc, indent=2) + "\n"
    if args.counts:
        with open(args.counts, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    for line in mismatches:
        print("hand annotation mismatch: " + line, file=sys.stderr)
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
