#include <cstdio>

int main() {
    std::puts("longalign: subcommands not wired yet");
    return 0;
}
