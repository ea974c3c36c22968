from typing import List, NamedTuple


class Verdict(NamedTuple):
    suite   : str
    passed  : bool
    detail  : str = ''

    def __str__(self):
        line = f'{"PASS" if self.passed else "FAIL"} {self.suite}'
        return f'{line}: {self.detail}' if self.detail else line


class VerdictCollection:
    """No data shall be provided to initiate an instance of this class."""

    def __init__(self):
        self.__verdicts: List[Verdict] = list()

    def add_verdict(self, suite: str, passed: bool, detail: str = '') -> Verdict:
        """Adds the verdict of one verification suite."""
        verdict = Verdict(suite, passed, detail)
        self.__verdicts.append(verdict)
        return verdict

    def get_failed(self) -> List[Verdict]:
        return [verdict for verdict in self.__verdicts if not verdict.passed]

    @property
    def passed(self) -> bool:
        return not self.get_failed()

    def __str__(self):
        print_ = ''
        for verdict in self.__verdicts:
            print_ += f'{verdict}\n'
        return print_
