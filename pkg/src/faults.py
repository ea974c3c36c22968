class StructuralFault(Exception):
    """Raised when a structural contract of the computation is broken."""
    message = 'structural fault'

    def __init__(self, detail: str = ''):
        super().__init__(detail)
        self.detail = detail

    def __str__(self):
        if self.detail:
            return f'{self.message}: {self.detail}'
        return self.message
