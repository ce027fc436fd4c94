#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "backend.hpp"

namespace forest::smt {

namespace {

std::string num(int64_t v) { return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v); }
std::string bname(int id) { return "b" + std::to_string(id); }
std::string iname(int id) { return "i" + std::to_string(id); }

void print(const Term& t, std::string& out)
{
    auto list = [&](const char* head, const std::vector<Term>& kids) {
        out += '(';
        out += head;
        for (const auto& k : kids) {
            out += ' ';
            print(k, out);
        }
        out += ')';
    };
    switch (t->op) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Bool: out += bname(t->var); return;
    case Op::Not: list("not", t->kids); return;
    case Op::And: list("and", t->kids); return;
    case Op::Or: list("or", t->kids); return;
    case Op::Implies: list("=>", t->kids); return;
    case Op::Iff: list("=", t->kids); return;
    case Op::IntEq: out += "(= " + iname(t->var) + " " + num(t->value) + ")"; return;
    case Op::IntLe: out += "(<= " + iname(t->var) + " " + num(t->value) + ")"; return;
    case Op::IntGe: out += "(>= " + iname(t->var) + " " + num(t->value) + ")"; return;
    case Op::IntIn:
        out += "(or";
        for (int64_t v : t->values)
            out += " (= " + iname(t->var) + " " + num(v) + ")";
        out += ")";
        return;
    case Op::IntEqInt: out += "(= " + iname(t->var) + " " + iname(t->var2) + ")"; return;
    case Op::AtMost: {
        if (t->kids.empty()) {
            out += t->value >= 0 ? "true" : "false";
            return;
        }
        out += "(<= ";
        if (t->kids.size() > 1)
            out += "(+";
        for (const auto& k : t->kids) {
            out += t->kids.size() > 1 ? " (ite " : "(ite ";
            print(k, out);
            out += " 1 0)";
        }
        if (t->kids.size() > 1)
            out += ")";
        out += " " + num(t->value) + ")";
        return;
    }
    }
}

// Minimal s-expression value used to read (get-value ...) replies.
struct Sexp {
    std::string atom;
    std::vector<Sexp> items;
    bool is_list = false;
};

Sexp parse_sexp(const std::string& s, size_t& pos)
{
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
    if (pos >= s.size())
        throw SolverError("truncated solver reply");
    Sexp e;
    if (s[pos] == '(') {
        e.is_list = true;
        ++pos;
        for (;;) {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
                ++pos;
            if (pos >= s.size())
                throw SolverError("truncated solver reply");
            if (s[pos] == ')') {
                ++pos;
                break;
            }
            e.items.push_back(parse_sexp(s, pos));
        }
        return e;
    }
    size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '(' && s[pos] != ')')
        ++pos;
    e.atom = s.substr(start, pos - start);
    return e;
}

int64_t int_value(const Sexp& e)
{
    if (!e.is_list)
        return std::stoll(e.atom);
    if (e.items.size() == 2 && !e.items[0].is_list && e.items[0].atom == "-")
        return -int_value(e.items[1]);
    throw SolverError("unexpected integer value in solver reply");
}

class SmtLibBackend final : public Backend {
public:
    explicit SmtLibBackend(std::string command) : command_(std::move(command))
    {
        int sv[2];
        if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0)
            throw SolverError(std::string("socketpair: ") + std::strerror(errno));
        pid_ = fork();
        if (pid_ < 0) {
            close(sv[0]);
            close(sv[1]);
            throw SolverError(std::string("fork: ") + std::strerror(errno));
        }
        if (pid_ == 0) {
            dup2(sv[1], STDIN_FILENO);
            dup2(sv[1], STDOUT_FILENO);
            std::string cmd = "exec " + command_;
            execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(sv[1]);
        fd_ = sv[0];
        send("(set-option :print-success false)\n"
             "(set-option :produce-models true)\n"
             "(set-option :global-declarations true)\n"
             "(set-logic QF_LIA)\n");
    }

    ~SmtLibBackend() override
    {
        if (fd_ >= 0) {
            std::string bye = "(exit)\n";
            ::send(fd_, bye.data(), bye.size(), MSG_NOSIGNAL);
            close(fd_);
        }
        if (pid_ > 0) {
            for (int i = 0; i < 50; ++i) {
                if (waitpid(pid_, nullptr, WNOHANG) == pid_)
                    return;
                usleep(2000);
            }
            kill(pid_, SIGKILL);
            waitpid(pid_, nullptr, 0);
        }
    }

    BoolVar new_bool() override
    {
        BoolVar v{nbools_++};
        send("(declare-const " + bname(v.id) + " Bool)\n");
        return v;
    }

    IntVar new_int(std::vector<int64_t> domain) override
    {
        IntVar v{nints_++};
        send("(declare-const " + iname(v.id) + " Int)\n");
        if (!domain.empty())
            add(in(v, std::move(domain)));
        return v;
    }

    void add(const Term& t) override
    {
        std::string out = "(assert ";
        print(t, out);
        out += ")\n";
        send(out);
    }

    void push() override { send("(push 1)\n"); }
    void pop() override { send("(pop 1)\n"); }

    CheckResult check() override
    {
        auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_));
        send("(check-sat)\n");
        std::string reply = read_sexp(deadline);
        if (reply == "unsat")
            return CheckResult::Unsat;
        if (reply != "sat")
            throw SolverError("solver answered: " + reply);
        model_.bools.assign(static_cast<size_t>(nbools_), 0);
        model_.ints.assign(static_cast<size_t>(nints_), 0);
        if (nbools_ + nints_ == 0)
            return CheckResult::Sat;
        std::string q = "(get-value (";
        for (int i = 0; i < nints_; ++i)
            q += " " + iname(i);
        for (int b = 0; b < nbools_; ++b)
            q += " " + bname(b);
        q += "))\n";
        send(q);
        std::string text = read_sexp(deadline);
        size_t pos = 0;
        Sexp e = parse_sexp(text, pos);
        if (!e.is_list)
            throw SolverError("solver answered: " + text);
        for (const auto& pair : e.items) {
            if (!pair.is_list || pair.items.size() != 2 || pair.items[0].is_list)
                throw SolverError("malformed get-value reply");
            const std::string& name = pair.items[0].atom;
            int id = std::stoi(name.substr(1));
            if (name[0] == 'i')
                model_.ints.at(static_cast<size_t>(id)) = int_value(pair.items[1]);
            else
                model_.bools.at(static_cast<size_t>(id)) = pair.items[1].atom == "true" ? 1 : 0;
        }
        return CheckResult::Sat;
    }

    const Model& model() const override { return model_; }
    std::string name() const override { return command_; }

private:
    using Clock = std::chrono::steady_clock;

    void send(const std::string& text)
    {
        if (fd_ < 0)
            throw SolverError("solver process is not running");
        size_t off = 0;
        while (off < text.size()) {
            ssize_t n = ::send(fd_, text.data() + off, text.size() - off, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                fail("write to solver failed");
            }
            off += static_cast<size_t>(n);
        }
    }

    [[noreturn]] void fail(const std::string& why)
    {
        if (fd_ >= 0)
            close(fd_);
        fd_ = -1;
        if (pid_ > 0) {
            kill(pid_, SIGKILL);
            waitpid(pid_, nullptr, 0);
            pid_ = -1;
        }
        throw SolverError(why);
    }

    // Reads one complete s-expression or atom from the solver.
    std::string read_sexp(Clock::time_point deadline)
    {
        for (;;) {
            size_t start = 0;
            while (start < buf_.size() && std::isspace(static_cast<unsigned char>(buf_[start])))
                ++start;
            if (start < buf_.size()) {
                if (buf_[start] != '(') {
                    size_t end = buf_.find('\n', start);
                    if (end != std::string::npos) {
                        std::string atom = buf_.substr(start, end - start);
                        buf_.erase(0, end + 1);
                        while (!atom.empty() && std::isspace(static_cast<unsigned char>(atom.back())))
                            atom.pop_back();
                        return atom;
                    }
                } else {
                    int depth = 0;
                    bool in_string = false;
                    for (size_t i = start; i < buf_.size(); ++i) {
                        char c = buf_[i];
                        if (c == '"')
                            in_string = !in_string;
                        if (in_string)
                            continue;
                        if (c == '(')
                            ++depth;
                        else if (c == ')' && --depth == 0) {
                            std::string expr = buf_.substr(start, i + 1 - start);
                            buf_.erase(0, i + 1);
                            if (expr.rfind("(error", 0) == 0)
                                throw SolverError("solver error: " + expr);
                            return expr;
                        }
                    }
                }
            }
            auto now = Clock::now();
            if (now >= deadline)
                fail_timeout();
            int ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
            pollfd p{fd_, POLLIN, 0};
            int r = poll(&p, 1, ms);
            if (r < 0) {
                if (errno == EINTR)
                    continue;
                fail("poll on solver failed");
            }
            if (r == 0)
                continue;
            char chunk[4096];
            ssize_t n = read(fd_, chunk, sizeof chunk);
            if (n < 0 && errno == EINTR)
                continue;
            if (n <= 0)
                fail("solver process exited");
            buf_.append(chunk, static_cast<size_t>(n));
        }
    }

    [[noreturn]] void fail_timeout()
    {
        try {
            fail("");
        } catch (const SolverError&) {
        }
        throw SolverTimeout("solver timed out");
    }

    std::string command_;
    pid_t pid_ = -1;
    int fd_ = -1;
    std::string buf_;
    int nbools_ = 0;
    int nints_ = 0;
    Model model_;
};

bool executable(const std::filesystem::path& p) { return access(p.c_str(), X_OK) == 0; }

std::string which(const std::string& name)
{
    if (name.find('/') != std::string::npos)
        return executable(name) ? name : "";
    const char* path = std::getenv("PATH");
    if (!path)
        return "";
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty())
            continue;
        auto p = std::filesystem::path(dir) / name;
        if (executable(p))
            return p.string();
    }
    return "";
}

std::string with_flags(const std::string& binary)
{
    std::string base = std::filesystem::path(binary).filename().string();
    if (base.rfind("z3", 0) == 0)
        return binary + " -in";
    if (base.rfind("cvc5", 0) == 0 || base.rfind("cvc4", 0) == 0)
        return binary + " --incremental --lang smt2";
    return binary;
}

}  // namespace

std::string to_smtlib(const Term& t)
{
    std::string out;
    print(t, out);
    return out;
}

std::unique_ptr<Backend> make_smtlib_backend(const std::string& command)
{
    return std::make_unique<SmtLibBackend>(command);
}

std::unique_ptr<Backend> make_backend(const std::string& solver)
{
    if (solver.empty() || solver == "builtin")
        return make_builtin_backend();
    if (solver.find(' ') != std::string::npos)
        return make_smtlib_backend(solver);
    std::string bin = which(solver);
    if (bin.empty())
        throw SolverError("solver not found: " + solver);
    return make_smtlib_backend(with_flags(bin));
}

std::string find_smtlib_solver()
{
    for (const char* name : {"z3", "cvc5"}) {
        std::string bin = which(name);
        if (!bin.empty())
            return with_flags(bin);
    }
    return "";
}

}  // namespace forest::smt
