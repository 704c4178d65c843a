#include <cstdio>

int main() {
    std::printf("gfdmsim: CLI not wired up yet\n");
    return 2;
}
