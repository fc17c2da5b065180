#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "rtlforge/util.hpp"
#include "rtlforge/vlog/interp.hpp"
#include "rtlforge/vlog/parser.hpp"
#include "rtlforge/vlog/value.hpp"
#include "support/temp_dir.hpp"

using namespace rtlforge::vlog;

namespace {

bool parses(const std::string& src) { return check_source(src, "test").empty(); }

struct SimRun {
    SimResult result;
    std::string output;
};

SimRun run_sim(const std::string& src, const std::string& top = "") {
    auto parsed = parse_source(src, "test");
    REQUIRE_MESSAGE(parsed.ok(), format_diags(parsed.diags));
    std::ostringstream out;
    SimOptions options;
    options.top = top;
    options.output = &out;
    options.max_steps = 5'000'000;
    SimRun run;
    run.result = simulate(parsed.modules, options);
    run.output = out.str();
    return run;
}

}  // namespace

TEST_CASE("value literals") {
    auto v = Value::parse_literal("8'hFF");
    REQUIRE(v);
    CHECK(v->width() == 8);
    CHECK(v->to_uint64() == 255);

    auto x = Value::parse_literal("4'b1x0z");
    REQUIRE(x);
    CHECK(x->width() == 4);
    CHECK(x->has_unknown());
    CHECK(x->fmt_bin() == "1x0z");

    auto dec = Value::parse_literal("1_000");
    REQUIRE(dec);
    CHECK(dec->to_uint64() == 1000);
    CHECK(dec->width() == 32);
    CHECK(dec->is_signed());

    auto ext = Value::parse_literal("8'bx");
    REQUIRE(ext);
    CHECK(ext->fmt_bin() == "xxxxxxxx");  // leading x extends
}

TEST_CASE("value arithmetic and x propagation") {
    auto a = Value::from_uint(200, 8);
    auto b = Value::from_uint(100, 8);
    CHECK(arith_add(a, b).to_uint64() == 44);  // wraps at 8 bits
    CHECK(arith_add(a.resized(9), b.resized(9)).to_uint64() == 300);

    auto x = Value::all_x(8);
    CHECK(arith_add(a, x).is_all_x());
    CHECK(logic_eq(a, x).truth() == Value::Truth::Unknown);
    CHECK(case_eq(x, Value::all_x(8)));

    auto s1 = Value::from_int(-5, 8);
    auto s2 = Value::from_int(3, 8);
    CHECK(arith_add(s1, s2).as_signed(true).to_int64() == -2);
    CHECK(logic_lt(s1, s2).truth() == Value::Truth::True);
    // unsigned compare of the same bits flips
    CHECK(logic_lt(s1.as_signed(false), s2.as_signed(false)).truth() == Value::Truth::False);
}

TEST_CASE("value formatting") {
    CHECK(Value::from_uint(999, 10).fmt_dec() == "999");
    CHECK(Value::from_uint(255, 8).fmt_hex() == "ff");
    CHECK(Value::from_uint(5, 4).fmt_bin() == "0101");
    CHECK(Value::from_int(-1, 8).as_signed(true).fmt_dec() == "-1");
    CHECK(Value::all_x(8).fmt_dec() == "x");
}

TEST_CASE("parser accepts the usual module shapes") {
    CHECK(parses("module m; endmodule"));
    CHECK(parses("module m(input a, output reg b); always @(posedge a) b <= ~b; endmodule"));
    CHECK(parses("module m(a, b); input a; output b; assign b = a; endmodule"));
    CHECK(parses("module m #(parameter W = 8)(input [W-1:0] d, output [W-1:0] q);\n"
                 "  assign q = d;\nendmodule"));
    CHECK(parses("module m; reg [7:0] mem [0:15]; integer i;\n"
                 "  initial for (i = 0; i < 16; i = i + 1) mem[i] = i;\nendmodule"));
    CHECK(parses("module m; wire y; and g(y, 1'b1, 1'b0); endmodule"));
    CHECK(parses("module m(input [7:0] a, output p); assign p = ^a; endmodule"));
    CHECK(parses("module m; reg [15:0] v; wire [3:0] nib = v[7 -: 4]; endmodule"));
    CHECK(parses("module m;\n"
                 "  function [3:0] inc; input [3:0] x; begin inc = x + 1; end endfunction\n"
                 "  wire [3:0] w = inc(4'd3);\nendmodule"));
    CHECK(parses("`define WIDTH 4\nmodule m; reg [`WIDTH-1:0] r; endmodule"));
    CHECK(parses("(* keep *) module m; endmodule"));
}

TEST_CASE("parser rejects broken syntax") {
    CHECK_FALSE(parses("module m; endmodul"));                     // misspelled keyword
    CHECK_FALSE(parses("module m; assign a = ; endmodule"));       // missing rhs
    CHECK_FALSE(parses("module m; always begin endmodule"));       // unterminated block
    CHECK_FALSE(parses("module m(input a output b); endmodule"));  // missing comma
    CHECK_FALSE(parses("module m; wire w endmodule"));             // missing semicolon
    CHECK_FALSE(parses("modul m; endmodule"));                     // not a module at all
}

TEST_CASE("sim: blocking vs nonblocking order") {
    auto run = run_sim(R"(
module tb;
    reg [7:0] a, b;
    initial begin
        a = 1;
        b = a + 1;          // blocking: sees a = 1
        $display("blocking b=%0d", b);
        a <= 7;
        b <= a + 1;         // nonblocking: rhs uses old a
        #1;
        $display("nba a=%0d b=%0d", a, b);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "blocking b=2\nnba a=7 b=2\n");
}

TEST_CASE("sim: posedge detection and x init") {
    auto run = run_sim(R"(
module tb;
    reg clk;
    reg [3:0] count;
    always @(posedge clk) count <= count + 1;
    initial begin
        $display("initial count=%b", count);
        clk = 0;
        count = 0;
        repeat (6) #5 clk = ~clk;
        $display("count=%0d", count);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "initial count=xxxx\ncount=3\n");
}

TEST_CASE("sim: case casez default") {
    auto run = run_sim(R"(
module tb;
    reg [3:0] sel;
    reg [7:0] out;
    always @(*) begin
        casez (sel)
            4'b1???: out = 8'd1;
            4'b01??: out = 8'd2;
            default: out = 8'd0;
        endcase
    end
    initial begin
        sel = 4'b1010; #1 $display("a=%0d", out);
        sel = 4'b0110; #1 $display("b=%0d", out);
        sel = 4'b0001; #1 $display("c=%0d", out);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "a=1\nb=2\nc=0\n");
}

TEST_CASE("sim: hierarchy, parameters, port connections") {
    auto run = run_sim(R"(
module adder #(parameter W = 4)(input [W-1:0] a, input [W-1:0] b, output [W:0] s);
    assign s = a + b;
endmodule

module tb;
    reg [7:0] x, y;
    wire [8:0] s;
    adder #(.W(8)) dut(.a(x), .b(y), .s(s));
    initial begin
        x = 200; y = 100;
        #1 $display("s=%0d", s);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "s=300\n");
}

TEST_CASE("sim: tasks block and copy out") {
    auto run = run_sim(R"(
module tb;
    reg clk;
    reg [7:0] got;
    always #5 clk = ~clk;
    task wait_and_double;
        input [7:0] x;
        output [7:0] y;
        begin
            @(posedge clk);
            y = x * 2;
        end
    endtask
    initial begin
        clk = 0;
        wait_and_double(8'd21, got);
        $display("got=%0d at %0t", got, $time);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "got=42 at 5\n");
}

TEST_CASE("sim: concat lvalue and part selects") {
    auto run = run_sim(R"(
module tb;
    reg [7:0] a, b;
    reg c;
    reg [15:0] w;
    initial begin
        {c, a} = 9'd300;
        $display("c=%b a=%0d", c, a);
        w = 16'habcd;
        b = w[11:4];
        $display("b=%h", b);
        w[3:0] = 4'hf;
        $display("w=%h", w);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "c=1 a=44\nb=bc\nw=abcf\n");
}

TEST_CASE("sim: wait statement") {
    auto run = run_sim(R"(
module tb;
    reg flag;
    initial begin
        flag = 0;
        #20 flag = 1;
    end
    initial begin
        wait (flag);
        $display("seen at %0t", $time);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "seen at 20\n");
}

TEST_CASE("sim: zero-delay loop aborts") {
    auto parsed = parse_source("module tb; reg a; always a = ~a; initial a = 0; endmodule",
                               "test");
    REQUIRE(parsed.ok());
    SimOptions options;
    options.max_steps = 10'000;
    std::ostringstream out;
    options.output = &out;
    auto result = simulate(parsed.modules, options);
    CHECK(result.aborted);
    CHECK_FALSE(result.finished);
}

TEST_CASE("sim: max_time cap") {
    auto parsed = parse_source(
        "module tb; reg clk; always #5 clk = ~clk; initial clk = 0; endmodule", "test");
    REQUIRE(parsed.ok());
    SimOptions options;
    options.max_time = 1000;
    std::ostringstream out;
    options.output = &out;
    auto result = simulate(parsed.modules, options);
    CHECK(result.aborted);
}

TEST_CASE("sim: signed arithmetic and shifts") {
    auto run = run_sim(R"(
module tb;
    reg signed [7:0] s;
    reg [7:0] u;
    initial begin
        s = -8;
        $display("sar=%0d", s >>> 1);
        u = 8'h80;
        $display("lsr=%0d", u >> 1);
        $display("mul=%0d", 4'd12 * 4'd13);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    // 12*13 at 4-bit self width = 156 % 16 = 12
    CHECK(run.output == "sar=-4\nlsr=64\nmul=12\n");
}

TEST_CASE("sim: functions evaluate synchronously") {
    auto run = run_sim(R"(
module tb;
    function [15:0] sum_to;
        input [7:0] n;
        integer i;
        begin
            sum_to = 0;
            for (i = 1; i <= n; i = i + 1) sum_to = sum_to + i;
        end
    endfunction
    wire [15:0] s = sum_to(8'd100);
    initial begin
        #1 $display("sum=%0d", s);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "sum=5050\n");
}

TEST_CASE("sim: $monitor fires on change") {
    auto run = run_sim(R"(
module tb;
    reg [3:0] v;
    initial begin
        v = 0;
        $monitor("v=%0d at %0t", v, $time);
        #5 v = 1;
        #5 v = 1;   // no change, no print
        #5 v = 2;
        #5 $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "v=0 at 0\nv=1 at 5\nv=2 at 15\n");
}

TEST_CASE("sim: $readmemh fills a memory") {
    testsupport::TempDir dir;
    auto data = dir.path / "mem.hex";
    rtlforge::util::write_file(data, "0a 0b\n@4 ff\n");
    auto run = run_sim(R"(
module tb;
    reg [7:0] mem [0:7];
    initial begin
        $readmemh(")" + data.string() + R"(", mem);
        $display("%h %h %h", mem[0], mem[1], mem[4]);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "0a 0b ff\n");
}

TEST_CASE("sim: wide vectors and replication") {
    auto run = run_sim(R"(
module tb;
    reg [127:0] wide;
    wire [15:0] rep = {4{4'ha}};
    initial begin
        wide = 128'h0123_4567_89ab_cdef_0011_2233_4455_6677;
        $display("%h", wide[63:32]);
        $display("%h", rep);
        wide = wide << 8;
        $display("%h", wide[127:96]);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "00112233\naaaa\n23456789\n");
}

TEST_CASE("sim: indexed part-select read and write") {
    auto run = run_sim(R"(
module tb;
    reg [31:0] word;
    integer i;
    initial begin
        word = 0;
        for (i = 0; i < 4; i = i + 1) word[i*8 +: 8] = 8'h10 + i;
        $display("%h", word);
        $display("%h", word[23 -: 8]);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "13121110\n12\n");
}

TEST_CASE("sim: hierarchical references into an instance") {
    auto run = run_sim(R"(
module inner;
    reg [3:0] state;
    initial state = 4'd9;
endmodule
module tb;
    inner dut();
    initial begin
        #1 $display("state=%0d", dut.state);
        $finish;
    end
endmodule
)", "tb");
    CHECK(run.result.finished);
    CHECK(run.output == "state=9\n");
}

TEST_CASE("sim: casex treats x as wildcard, case does not") {
    auto run = run_sim(R"(
module tb;
    reg [1:0] sel;
    reg [3:0] a, b;
    initial begin
        sel = 2'b1x;
        casex (sel)
            2'b10: a = 1;
            default: a = 0;
        endcase
        case (sel)
            2'b10: b = 1;
            default: b = 0;
        endcase
        $display("a=%0d b=%0d", a, b);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "a=1 b=0\n");
}

TEST_CASE("sim: disable unwinds a named block") {
    auto run = run_sim(R"(
module tb;
    integer i;
    initial begin : outer
        for (i = 0; i < 10; i = i + 1) begin
            if (i == 3) disable outer;
        end
        i = 99;  // never reached
    end
    initial begin
        #1 $display("i=%0d", i);
        $finish;
    end
endmodule
)");
    CHECK(run.result.finished);
    CHECK(run.output == "i=3\n");
}

TEST_CASE("preprocessor conditionals and includes") {
    CHECK(parses("`define FAST\n`ifdef FAST\nmodule m; endmodule\n`else\ngarbage\n`endif\n"));
    // dead branch is stripped entirely, so the junk inside never parses
    CHECK(parses("`ifdef MISSING\ntotal garbage ( ;\n`endif\nmodule m; endmodule"));
    // live branch must parse
    CHECK_FALSE(parses("`define X 1\n`ifdef X\ntotal garbage ( ;\n`endif\nmodule m; endmodule"));
    CHECK_FALSE(parses("`include \"no_such_file.vh\"\nmodule m; endmodule"));
}
