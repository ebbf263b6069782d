#include "zsm/cli.hpp"

int main(int argc, char** argv) {
    return zsm::cli::run(argc, argv);
}
