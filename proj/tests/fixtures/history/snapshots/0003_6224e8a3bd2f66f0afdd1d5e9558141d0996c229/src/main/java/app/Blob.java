��  not text
