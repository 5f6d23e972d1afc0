import pytest
from mock import patch

from fsilab._slip.task import SlipTask


step = SlipTask.step


class StepsTask(SlipTask):
    """Runs two steps in order.

    Second paragraph of the description.
    """

    def add_args(self):
        super(StepsTask, self).add_args()
        self.parser.add_argument("--skip", help="skip a step")

    @step("Assemble system")
    def assemble(self):
        print("assemble")

    @step("Advance state")
    def advance(self):
        print("advance")

    def run(self):
        self.assemble()
        self.advance()


def test_skip(capsys):
    """A step named in --skip is not run; the others are"""
    task = StepsTask()
    with patch("sys.argv", ["", "--skip", "assemble-system"]):
        assert task.main() == 0

    out, _ = capsys.readouterr()
    assert "advance" in out
    assert "assemble" not in out


def test_description_keeps_paragraphs():
    """The parser description is the dedented class doc string"""
    description = StepsTask().description
    assert description.startswith("Runs two steps in order.")
    assert "\n\nSecond paragraph of the description." in description


def test_undocumented_description():
    class Bare(SlipTask):
        pass

    Bare.__doc__ = None
    assert Bare().description == "<undocumented command>"


def test_task_run():
    """raises if run() is not implemented"""
    task = SlipTask()
    with pytest.raises(NotImplementedError):
        task.run()


def test_description_keeps_indented_paragraphs():
    """Indented blocks such as kind tables are not re-wrapped"""

    class Tabled(SlipTask):
        """Checks residuals.

        Kinds:

          bubble:cx,cy,r     compactly supported bump
          rigid:u,v,omega    rigid motion
        """

    description = Tabled().description
    assert "  bubble:cx,cy,r     compactly supported bump\n  rigid:u,v,omega" in description
