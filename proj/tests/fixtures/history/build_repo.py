#!/usr/bin/env python3
"""Replays a snapshot directory into a fresh git repository.

Each `NNNN_<id>/` tree becomes one commit on a single branch, with the message
and committer date from commits.jsonl. Identity, dates and config are pinned,
so the resulting commit ids are reproducible and equal the `<id>` suffixes.

usage: build_repo.py SNAPSHOT_DIR REPO_DIR
"""
import json
import os
import shutil
import subprocess
import sys


def git(repo, *args, env=None):
    return subprocess.run(["git", "-C", repo, *args], check=True, capture_output=True, text=True, env=env).stdout


def main():
    snapshots, repo = sys.argv[1], sys.argv[2]
    with open(os.path.join(snapshots, "commits.jsonl"), encoding="utf-8") as f:
        commits = [json.loads(line) for line in f if line.strip()]
    dirs = sorted(d for d in os.listdir(snapshots) if os.path.isdir(os.path.join(snapshots, d)))

    env = dict(os.environ)
    env.update({
        "GIT_CONFIG_GLOBAL": os.devnull,
        "GIT_CONFIG_NOSYSTEM": "1",
        "GIT_AUTHOR_NAME": "Fixture Author",
        "GIT_AUTHOR_EMAIL": "author@example.com",
        "GIT_COMMITTER_NAME": "Fixture Author",
        "GIT_COMMITTER_EMAIL": "author@example.com",
        "TZ": "UTC",
    })
    if os.path.exists(repo):
        shutil.rmtree(repo)
    os.makedirs(repo)
    subprocess.run(["git", "init", "-q", "-b", "main", repo], check=True, env=env)

    for ordinal, commit in enumerate(commits):
        prefix = f"{ordinal:04d}_"
        source = next(d for d in dirs if d.startswith(prefix))
        for entry in os.listdir(repo):
            if entry != ".git":
                path = os.path.join(repo, entry)
                shutil.rmtree(path) if os.path.isdir(path) else os.remove(path)
        shutil.copytree(os.path.join(snapshots, source), repo, dirs_exist_ok=True)
        git(repo, "add", "-A", env=env)
        stamp = commit["timestamp"]
        env["GIT_AUTHOR_DATE"] = stamp
        env["GIT_COMMITTER_DATE"] = stamp
        subprocess.run(["git", "-C", repo, "-c", "commit.gpgsign=false", "commit", "-q", "--allow-empty", "-F", "-"],
                       input=commit["message"], check=True, text=True, env=env)
        print(git(repo, "rev-parse", "HEAD", env=env).strip())


if __name__ == "__main__":
    main()
