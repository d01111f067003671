#!/usr/bin/env python3
"""Mock external proof checker used by the test suite.

Protocol: a JSON request arrives on stdin; acceptance is signaled by exit
status 0 together with the contract hash echoed on stdout.
"""
import json
import sys
import time


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "accept"
    request = json.loads(sys.stdin.readline())
    if mode == "timeout":
        time.sleep(60)
        return 0
    if mode == "wrong-hash":
        print("0000000000000000")
        return 0
    if mode == "reject":
        print(request["contract"]["hash"])
        return 1
    print(request["contract"]["hash"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
