#!/usr/bin/env python3
# Copyright 2026 The repurpose-loc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Prepend the Apache-2.0 header to C++ and CMake sources that lack it."""

import argparse
import pathlib
import sys

HEADER_LINES = [
    "Copyright 2026 The repurpose-loc Authors",
    "",
    'Licensed under the Apache License, Version 2.0 (the "License");',
    "you may not use this file except in compliance with the License.",
    "You may obtain a copy of the License at",
    "",
    "    http://www.apache.org/licenses/LICENSE-2.0",
    "",
    "Unless required by applicable law or agreed to in writing, software",
    'distributed under the License is distributed on an "AS IS" BASIS,',
    "WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.",
    "See the License for the specific language governing permissions and",
    "limitations under the License.",
]

COMMENT = {".cpp": "//", ".hpp": "//", ".h": "//", ".txt": "#", ".cmake": "#", ".py": "#", ".sh": "#"}
SOURCE_DIRS = ["include", "src", "tests", "tools"]
MARKER = "Licensed under the Apache License"


def header_for(prefix: str) -> str:
    return "".join(f"{prefix} {line}".rstrip() + "\n" for line in HEADER_LINES) + "\n"


def candidates(root: pathlib.Path):
    yield root / "CMakeLists.txt"
    for d in SOURCE_DIRS:
        for path in sorted((root / d).rglob("*")):
            if path.is_file() and (path.suffix in COMMENT) and (path.suffix != ".txt" or path.name == "CMakeLists.txt"):
                yield path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("root", nargs="?", default=pathlib.Path(__file__).resolve().parent.parent, type=pathlib.Path)
    parser.add_argument("--check", action="store_true", help="list files missing the header and exit non-zero")
    args = parser.parse_args()

    missing = []
    for path in candidates(args.root):
        text = path.read_text(encoding="utf-8")
        if MARKER in text[:2000]:
            continue
        missing.append(path)
        if args.check:
            continue
        shebang = ""
        if text.startswith("#!"):
            shebang, _, text = text.partition("\n")
            shebang += "\n"
        path.write_text(shebang + header_for(COMMENT[path.suffix]) + text, encoding="utf-8")

    for path in missing:
        print(("missing: " if args.check else "added: ") + str(path.relative_to(args.root)))
    return 1 if args.check and missing else 0


if __name__ == "__main__":
    sys.exit(main())
