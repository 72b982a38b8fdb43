#!/usr/bin/env python3
import json
import sys
import time

hs = json.loads(sys.stdin.readline())
print(json.dumps({"ok": True}), flush=True)
for line in sys.stdin:
    time.sleep(5)
