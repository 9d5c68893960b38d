#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <optional>

#include "edgar/mock/mock_edgar_server.hpp"
#include "edgar/mock/mock_extraction_service.hpp"
#include "edgar/mock/s3_emulator.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Serve a fixture tree as a local EDGAR archive"};
    std::string root;
    std::string overlay;
    int port = 8080;
    int s3_port = -1;
    int extractor_port = -1;
    app.add_option("--root", root, "Fixture tree with archives/ and metadata/")->required()->check(CLI::ExistingDirectory);
    app.add_option("--overlay", overlay, "Tree whose files take precedence over --root")->check(CLI::ExistingDirectory);
    app.add_option("--port", port, "Archive port (0 picks a free one)");
    app.add_option("--s3-port", s3_port, "Also run the S3 emulator on this port");
    app.add_option("--extractor-port", extractor_port, "Also run the extraction service on this port");
    CLI11_PARSE(app, argc, argv);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    edgar::mock::MockEdgarServer archive(root);
    if (!overlay.empty()) {
        archive.set_overlay(overlay);
    }
    archive.start(port);
    std::cout << "archive   " << archive.base_url() << "\nmetadata  " << archive.metadata_base_url() << '\n';

    std::optional<edgar::mock::S3Emulator> s3;
    if (s3_port >= 0) {
        s3.emplace();
        s3->start(s3_port);
        std::cout << "s3        " << s3->endpoint() << '\n';
    }
    std::optional<edgar::mock::MockExtractionService> extractor;
    if (extractor_port >= 0) {
        extractor.emplace();
        extractor->start(extractor_port);
        std::cout << "extractor " << extractor->url() << '\n';
    }
    std::cout.flush();

    int received = 0;
    sigwait(&signals, &received);
    return 0;
}
