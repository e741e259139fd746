#!/usr/bin/env python3
"""
superres console entry point; tables print δ, Ω and ± so the standard streams are switched to
UTF-8 first
"""

import io
import os
import sys
from typing import TextIO


def _is_utf8(stream: TextIO) -> bool:
    encoding = getattr(stream, 'encoding', None) or ''
    return encoding.lower().replace('-', '').replace('_', '') == 'utf8'


def utf8_stream(stream: TextIO) -> TextIO:
    """The same stream re-encoded as UTF-8, or a UTF-8 wrapper around its buffer"""
    if _is_utf8(stream):
        return stream
    try:
        stream.reconfigure(encoding='utf-8', errors='replace')
        return stream
    except AttributeError:
        return io.TextIOWrapper(stream.buffer, encoding='utf-8', errors='replace')


def main():
    sys.stdout = utf8_stream(sys.stdout)
    sys.stderr = utf8_stream(sys.stderr)
    os.environ.setdefault('PYTHONIOENCODING', 'utf-8')

    from superres.cli import cli
    cli(prog_name='superres')


if __name__ == '__main__':
    main()
