from commands import check_operator, check_semigroup, corpus, embed, lemma, translation

# 子命令按注册顺序出现在 --help 中
COMMANDS = (lemma, check_operator, check_semigroup, translation, embed, corpus)
