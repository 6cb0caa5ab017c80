#!/usr/bin/env python3
# Copyright 2026 The crashrisk Authors
# SPDX-License-Identifier: Apache-2.0
"""Prepend the Apache-2.0 header to first-party sources that lack it. Idempotent."""

import pathlib
import sys

NOTICE = """Copyright 2026 The crashrisk Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License."""

MARKER = "Licensed under the Apache License, Version 2.0"
DIRS = ["src", "include", "tests", "tools"]


def header(prefix):
    return "\n".join((prefix + line).rstrip() for line in NOTICE.splitlines()) + "\n\n"


def style(path):
    if path.suffix in {".cpp", ".hpp", ".h", ".cc"}:
        return "// "
    if path.suffix == ".py" or path.name == "CMakeLists.txt":
        return "# "
    return None


def main(root):
    root = pathlib.Path(root)
    files = [root / "CMakeLists.txt"] + [p for d in DIRS for p in sorted((root / d).rglob("*")) if p.is_file()]
    changed = 0
    for path in files:
        prefix = style(path)
        if prefix is None:
            continue
        text = path.read_text()
        if MARKER in text[:2000]:
            continue
        shebang = ""
        if text.startswith("#!"):
            shebang, _, text = text.partition("\n")
            shebang += "\n"
        path.write_text(shebang + header(prefix) + text)
        changed += 1
    print(f"headers added to {changed} files")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent)
