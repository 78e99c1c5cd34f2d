import hashlib
import json
import os
import tempfile


def make_directory(dir_name):
    """Creates dir_name (and parents) if missing and returns its absolute path."""
    path = os.path.abspath(dir_name)
    if not os.path.isdir(path):
        os.makedirs(path, exist_ok=True)
    return path


def canonical_json(data):
    """Serializes data the same way every time: sorted keys, two space indent."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + '\n'


def sha256_text(text):
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


def write_text_atomic(path, text):
    """Writes text to path through a temporary sibling so readers never see half a file."""
    directory = os.path.dirname(os.path.abspath(path))
    make_directory(directory)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.tmp-')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_json(path, data):
    write_text_atomic(path, canonical_json(data))


def read_json(path):
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def read_text(path):
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def strip_keys(data, keys):
    """Returns a copy of nested dicts/lists without the given keys at any depth."""
    if isinstance(data, dict):
        return {k: strip_keys(v, keys) for k, v in data.items() if k not in keys}
    if isinstance(data, list):
        return [strip_keys(v, keys) for v in data]
    return data
