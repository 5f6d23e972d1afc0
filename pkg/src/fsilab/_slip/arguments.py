import os
from argparse import Action


def from_environ(key, delegate_converter=lambda x: x):
    """An argparse ``type`` which falls back to an environment variable.

    Usage:

      add_argument('--output-dir', default='', type=from_environ('FSILAB_OUTPUT_DIR'))

    Combine with another converter for non-string values:

      add_argument('--workers', default='', type=from_environ('FSILAB_WORKERS', int))

    The variable is read when arguments are parsed, not when the parser is
    built, so tests can set it with monkeypatch after constructing a task.
    Its value never shows up in ``--help``.

    Arguments:
        key (str)
            Name of the environment variable.
        delegate_converter (callable)
            Converter applied to the resulting value.

    Returns:
        object
            The converted argument value.
    """
    return FromEnvironmentConverter(key, delegate_converter)


class FromEnvironmentConverter(object):
    def __init__(self, key, delegate):
        self.key = key
        self.delegate = delegate

    def __call__(self, value):
        if not value:
            value = os.environ.get(self.key)
        if value is None or value == "":
            return None
        return self.delegate(value)


class SplitAndExtend(Action):
    """Argparse action accumulating delimited values over repeated options.

    ``--option a,b --option c`` gives ``["a", "b", "c"]``. The delimiter is
    ``split_on`` (a comma by default); options whose items contain commas,
    such as test function specs, pass another one:

        >>> parser.add_argument("--test-fn", action=SplitAndExtend, split_on=";")
        >>> parser.parse_args(["--test-fn", "bubble:1,1,0.5;rigid:0,0,1"]).test_fn
        ['bubble:1,1,0.5', 'rigid:0,0,1']

    Empty items are dropped.
    """

    def __init__(self, *args, **kwargs):
        self.__split_on = kwargs.pop("split_on", ",")
        super(SplitAndExtend, self).__init__(*args, **kwargs)

    def __call__(self, _, namespace, values, options=None):
        items = list(getattr(namespace, self.dest, None) or [])
        if isinstance(values, str):
            values = [values]
        for value in values:
            split = value.split(self.split_on) if isinstance(value, str) else [value]
            items.extend(item.strip() for item in split if item.strip())
        setattr(namespace, self.dest, items)

    @property
    def split_on(self):
        return self.__split_on
